#pragma once

// File ingestion and machine-readable reports. Systems are described in a
// small JSON schema (documented in the README): named blocks, each an
// explicit/iru/ordered matrix set, plus a composition that is either an
// expression tree over the blocks (ref/add/mul/scale) or a series-parallel
// graph (edge/series/parallel). Reports carry provenance (input hash, seed,
// tool version) and reproduce byte-for-byte for identical inputs and flags.

#include "possys/algebra.hpp"
#include "possys/hourglass.hpp"
#include "possys/matrix_set.hpp"
#include "possys/spectral.hpp"
#include "possys/trajectory.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace possys {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

struct SystemDescription {
    int version = kFormatVersion;
    BlockEnv blocks;
    CompositionExpr composition;
    std::string canonical;      // canonical serialized form, newline-terminated
    std::uint64_t input_hash = 0;
};

/// Parses and validates a system file; every constructor error surfaces as
/// ParseErrorAt (malformed text, with line/column) or ValidationErrorAt
/// (named block or composition, with the reason).
SystemDescription parse_system(const std::string& path);
SystemDescription parse_system_text(const std::string& text);

/// Canonical form: sorted keys, numbers as shortest round-trip doubles.
/// parse(serialize(parse(text))) is the identity on descriptions.
std::string serialize_system(const SystemDescription& description);

std::uint64_t fnv1a_hash(const std::string& bytes);
std::string hash_hex(std::uint64_t hash);

std::optional<NormKind> parse_norm(const std::string& name);
std::optional<Direction> parse_direction(const std::string& name);
std::optional<MonotoneObjective> parse_objective(const std::string& name);
/// Comma-separated positive coordinates, e.g. "1,2.5,3".
Vec parse_vector_arg(const std::string& text);

// ---------------------------------------------------------------------------
// Verification orchestration (brute-force cross-checks of a parsed system)
// ---------------------------------------------------------------------------

struct VerifyOptions {
    int max_depth = 4;
    int trials = 10;
    std::uint64_t seed = 0;
    NormKind norm = NormKind::Inf;
    std::uint64_t budget = kDefaultOracleBudget;
    std::uint64_t enum_limit = kDefaultEnumLimit;
    std::uint64_t hourglass_samples = 200;
};

struct DepthCheck {
    BoundReport bounds;
    bool jsr_within = false;    // jsr_lower <= rho_max + 1e-8
    bool lsr_within = false;    // lsr_upper >= rho_min - 1e-8
    bool max_attained = false;  // |jsr_lower - rho_max| <= 1e-8
    bool min_attained = false;  // |lsr_upper - rho_min| <= 1e-8
};

struct TrajectoryTrial {
    int steps = 0;
    Direction direction = Direction::Max;
    std::string objective;
    double greedy_value = 0.0;
    double exhaustive_value = 0.0;
    bool agree = false;
    bool no_dominant = false;  // greedy aborted on a non-H witness state
};

struct VerifyReport {
    AnalysisReport analysis;
    std::vector<DepthCheck> depth_checks;
    std::vector<TrajectoryTrial> trials;
    bool extrema_consistent = false;
    bool greedy_consistent = false;
    bool expected_for_non_h = false;  // inconsistencies with a falsified H-status
    bool pass = false;
};

/// Product bounds at depths 1..max_depth checked against the spectral
/// extrema, plus seeded greedy-vs-exhaustive trajectory trials. For sets
/// whose H-status is falsified, inconsistencies are flagged as expected
/// rather than failed: without the hourglass property the extrema bound
/// nothing.
VerifyReport run_verification(const MatrixSet& set, const VerifyOptions& opts);

// ---------------------------------------------------------------------------
// Report documents and CLI commands
// ---------------------------------------------------------------------------

struct DocumentMeta {
    std::string command;
    std::uint64_t input_hash = 0;
    std::uint64_t seed = 0;
};

std::string render_analysis_document(const DocumentMeta& meta, const AnalyzeOptions& opts,
                                     const AnalysisReport& report);
std::string render_trajectory_document(const DocumentMeta& meta, const TrajectoryResult& result,
                                       const std::optional<StabilizationReport>& stabilization);
std::string render_hourglass_document(const DocumentMeta& meta, std::uint64_t samples_requested,
                                      const HourglassVerdict& verdict);
std::string render_verify_document(const DocumentMeta& meta, const VerifyOptions& opts,
                                   const VerifyReport& report);

// Exit codes: 0 success, 2 parse/validation/usage, 3 budget or cardinality,
// 4 no dominant matrix. Commands print the report document on out and
// diagnostics on err.

struct AnalyzeArgs {
    int oracle_depth = 0;
    std::string norm = "inf";
    std::uint64_t samples = 1000;
    std::uint64_t seed = 0;
    std::uint64_t limit = kDefaultEnumLimit;
    std::uint64_t budget = kDefaultOracleBudget;
    bool greedy = false;
    std::vector<std::string> forced_witnesses;  // extra hourglass probes "x1,x2,..."
};

struct TrajectoryArgs {
    std::string x0;
    int steps = 10;
    std::string direction = "max";
    std::string nu = "l1";  // comma-separated list of l1|l2|linf
    std::uint64_t seed = 0;
    std::uint64_t limit = kDefaultEnumLimit;
    bool renormalize = false;
};

struct VerifyArgs {
    int max_depth = 4;
    int trials = 10;
    std::uint64_t seed = 0;
    std::string norm = "inf";
    std::uint64_t budget = kDefaultOracleBudget;
    std::uint64_t limit = kDefaultEnumLimit;
    std::uint64_t samples = 200;
};

struct HourglassArgs {
    std::uint64_t samples = 1000;
    std::uint64_t seed = 0;
    std::uint64_t limit = kDefaultEnumLimit;
    std::vector<std::string> include_witness;
};

int cmd_analyze(const std::string& path, const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_trajectory(const std::string& path, const TrajectoryArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& path, const VerifyArgs& args, std::ostream& out, std::ostream& err);
int cmd_hourglass(const std::string& path, const HourglassArgs& args, std::ostream& out, std::ostream& err);

}  // namespace possys
