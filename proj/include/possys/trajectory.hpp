#pragma once

// Greedy construction of extremal switching trajectories. Step k+1 applies
// the member whose image of the current state dominates all member images
// element-wise; for H-sets the resulting state maximizes (minimizes) every
// coordinate-wise monotone objective over all K^n switching sequences, at a
// cost of n dominance scans. The construction never consumes an objective;
// objective traces are evaluated afterwards on the recorded states.

#include "possys/errors.hpp"
#include "possys/hourglass.hpp"
#include "possys/matrix_set.hpp"
#include "possys/objective.hpp"
#include "possys/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace possys {

/// Per-objective values along a trajectory; values[k] belongs to state k and
/// includes the renormalization factor (all built-in objectives are
/// positively homogeneous, so folding the factor back is exact).
struct ObjectiveTrace {
    MonotoneObjective objective;
    std::vector<double> values;
};

struct TrajectoryResult {
    int steps = 0;
    Direction direction = Direction::Max;
    std::vector<std::uint64_t> chosen;   // flat member id applied at step k+1
    std::vector<Vec> states;             // x_0 .. x_n as stored (unit 1-norm when renormalized)
    std::vector<double> log_scales;      // true x_k = exp(log_scales[k]) * states[k]
    std::vector<ObjectiveTrace> objectives;
    std::uint64_t selection_passes = 0;
    std::uint64_t nu_evaluations = 0;
    bool renormalized = false;
};

struct TrajectoryOptions {
    /// Rescale states to unit 1-norm between steps so long unstable
    /// trajectories cannot overflow. Dominant selection is invariant under
    /// positive scaling of the state (the explicit path re-verifies at the
    /// scaled state either way); the factor is kept in log_scales.
    bool renormalize = false;
    std::uint64_t enum_limit = kDefaultEnumLimit;
};

/// Builds the greedy trajectory of n steps from x0 > 0. Throws
/// NoDominantMatrixError (with the offending state attached) if some visited
/// state has no dominant member, i.e. the set is not an H-set there.
inline TrajectoryResult greedy_trajectory(const MatrixSet& set, const Vec& x0, int n, Direction dir,
                                          const TrajectoryOptions& opts = {}) {
    if (!set.square()) throw Error(Errc::NotSquare, "trajectories need a square set");
    if (n < 1) throw Error(Errc::ValidationError, "step count must be at least 1");
    detail::require_positive_probe(x0, set);

    TrajectoryResult result;
    result.steps = n;
    result.direction = dir;
    result.renormalized = opts.renormalize;
    result.states.reserve(static_cast<std::size_t>(n) + 1);
    result.log_scales.reserve(static_cast<std::size_t>(n) + 1);
    result.chosen.reserve(static_cast<std::size_t>(n));
    result.states.push_back(x0);
    result.log_scales.push_back(0.0);

    Vec current = x0;
    double log_scale = 0.0;
    for (int k = 0; k < n; ++k) {
        const DominanceCertificate cert = detail::dominant_impl(set, current, dir, opts.enum_limit);
        ++result.selection_passes;
        result.chosen.push_back(cert.member);
        Vec next = cert.image;
        if (opts.renormalize) {
            const double s = next.sum();
            if (s > 0.0) {
                log_scale += std::log(s);
                next /= s;
            }
        }
        result.states.push_back(next);
        result.log_scales.push_back(log_scale);
        current = std::move(next);
    }
    return result;
}

/// Evaluates an objective at every recorded state and appends the trace.
inline const ObjectiveTrace& evaluate_objective(TrajectoryResult& result, const MonotoneObjective& obj) {
    ObjectiveTrace trace{obj, {}};
    trace.values.reserve(result.states.size());
    for (std::size_t k = 0; k < result.states.size(); ++k) {
        trace.values.push_back(nu_eval(obj, result.states[k]) * std::exp(result.log_scales[k]));
        ++result.nu_evaluations;
    }
    result.objectives.push_back(std::move(trace));
    return result.objectives.back();
}

/// Greedy minimization plus the stabilization context: the observed 1-norm
/// decay rate against the smallest member spectral radius.
struct StabilizationReport {
    TrajectoryResult trajectory;
    double rho_min = 0.0;
    std::uint64_t rho_min_witness = 0;
    bool stabilizable = false;
    double decay_rate_l1 = 0.0;  // (nu1(x_n) / nu1(x_0))^(1/n)
};

inline StabilizationReport stabilizing_sequence(const MatrixSet& set, const Vec& x0, int n,
                                                const TrajectoryOptions& opts = {}) {
    StabilizationReport report;
    report.trajectory = greedy_trajectory(set, x0, n, Direction::Min, opts);
    evaluate_objective(report.trajectory, MonotoneObjective::l1());

    const RhoExtrema extrema = rho_extrema(set, opts.enum_limit);
    report.rho_min = extrema.rho_min;
    report.rho_min_witness = extrema.min_witness;
    report.stabilizable = extrema.rho_min < 1.0;

    // Work in logs: with renormalization enabled the raw values could
    // over/underflow long before the rate does.
    const auto& result = report.trajectory;
    const double log_first = std::log(nu_eval(MonotoneObjective::l1(), result.states.front()));
    const double log_last = std::log(nu_eval(MonotoneObjective::l1(), result.states.back())) +
                            result.log_scales.back() - result.log_scales.front();
    report.decay_rate_l1 = std::exp((log_last - log_first) / static_cast<double>(n));
    return report;
}

}  // namespace possys
