#pragma once

// Spectral radius of non-negative matrices and spectral extrema of matrix
// sets. The stability story: for sets in the IRU/ordered family (and their
// Minkowski compositions) the joint spectral radius equals the largest
// member radius and the lower spectral radius equals the smallest, so
// rho_max < 1 decides stability and rho_min < 1 decides stabilizability.
// product_bounds provides the brute-force side: enumerated product bounds
// that must straddle those extrema.
//
// The kernel iterates on A/s + I, s the max row sum. Shifting kills rotating
// eigenvalue clusters of periodic non-negative matrices, normalizing first
// keeps the shift proportionate for matrices of any magnitude, and for
// positive start vectors the ratios (Av/s + v)_i / v_i enclose rho(A)/s + 1
// (Collatz-Wielandt), giving a certified stopping test. Reducible matrices,
// whose enclosure never closes, fall back to a dense Hessenberg-QR
// eigensolve.

#include "possys/errors.hpp"
#include "possys/hourglass.hpp"
#include "possys/matrix_set.hpp"
#include "possys/oracle.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace possys {

inline constexpr double kSpectralRelTol = 1e-12;
inline constexpr std::uint64_t kPowerIterationBudget = 100'000;
inline constexpr Index kDenseFallbackMaxDim = 64;

struct SpectralResult {
    double value = 0.0;
    Vec witness;                   // dominant-eigenvector estimate, L1-normalized
    std::uint64_t iterations = 0;
    bool converged = false;
    bool dense_fallback = false;
};

/// Largest eigenvalue modulus via a dense eigensolve. Works for any square
/// real matrix; this is the oracle side of the power-iteration kernel.
inline SpectralResult spectral_radius_dense(const Mat& a) {
    if (a.rows() != a.cols()) throw Error(Errc::NotSquare, "spectral radius needs a square matrix");
    if (!a.allFinite()) throw Error(Errc::NonFinite, "matrix has non-finite entries");
    Eigen::EigenSolver<Mat> solver(a, /*computeEigenvectors=*/true);
    const auto eigenvalues = solver.eigenvalues();
    Index best = 0;
    double value = 0.0;
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        const double mod = std::abs(eigenvalues(i));
        if (mod > value) {
            value = mod;
            best = i;
        }
    }
    SpectralResult result;
    result.value = value;
    result.witness = solver.eigenvectors().col(best).cwiseAbs();
    const double s = result.witness.sum();
    if (s > 0.0) result.witness /= s;
    result.converged = true;
    result.dense_fallback = true;
    return result;
}

namespace detail {

struct PowerOutcome {
    double value = 0.0;
    std::uint64_t iterations = 0;
    bool converged = false;
};

/// Power iteration on A/s + I (s the max row sum) for non-negative A and
/// positive start vector v. Normalizing before the shift keeps the iteration
/// scale-invariant: the shifted spectrum lives in [1, 2] whatever the size
/// of the entries, so tolerances measured against the unshifted estimate
/// mean the same thing for tiny and huge matrices. Stops when the
/// Collatz-Wielandt enclosure closes, or when the Rayleigh quotient stops
/// drifting for three consecutive iterations (reducible matrices keep the
/// enclosure open even at the fixed point).
template <class MatT, class VecT>
PowerOutcome shifted_power(const MatT& a, VecT& v, double rel_tol, std::uint64_t max_iterations) {
    PowerOutcome out;
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    if (norm == 0.0) {
        out.value = 0.0;
        out.converged = true;
        out.iterations = 0;
        return out;
    }
    const double inv_norm = 1.0 / norm;
    // relative floor: below this the value is certified in absolute terms
    constexpr double kFloor = 1e-6;
    double rayleigh_prev = std::numeric_limits<double>::quiet_NaN();
    int calm = 0;
    VecT w(v.size());
    for (std::uint64_t it = 1; it <= max_iterations; ++it) {
        w.noalias() = a * v;
        w *= inv_norm;
        w += v;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (Index i = 0; i < v.size(); ++i) {
            const double ratio = w(i) / v(i);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        out.iterations = it;
        if (hi - lo <= rel_tol * std::max(hi - 1.0, kFloor)) {
            out.value = norm * (0.5 * (lo + hi) - 1.0);
            out.converged = true;
            v = w / w.sum();
            return out;
        }
        const double rayleigh = v.dot(w) / v.squaredNorm();
        if (std::abs(rayleigh - rayleigh_prev) <= rel_tol * std::max(rayleigh - 1.0, kFloor)) {
            ++calm;
        } else {
            calm = 0;
        }
        rayleigh_prev = rayleigh;
        v = w / w.sum();
        if (calm >= 3) {
            out.value = norm * (rayleigh - 1.0);
            out.converged = true;
            return out;
        }
    }
    out.value = std::isnan(rayleigh_prev) ? 0.0 : norm * (rayleigh_prev - 1.0);
    return out;
}

/// rho of a non-negative matrix for inner loops: certified enclosure first,
/// dense fallback if it refuses to close.
template <class MatT, class VecT>
double rho_exact(const MatT& a, VecT v, double rel_tol = kSpectralRelTol, std::uint64_t cap = 5000) {
    const PowerOutcome out = shifted_power(a, v, rel_tol, cap);
    if (out.converged) return out.value;
    return spectral_radius_dense(Mat(a)).value;
}

}  // namespace detail

/// Spectral radius of a square non-negative matrix: shifted power iteration
/// with an all-ones start, dense fallback for matrices up to
/// kDenseFallbackMaxDim when the iteration budget runs out.
inline SpectralResult spectral_radius(const Mat& a, double rel_tol = kSpectralRelTol,
                                      std::uint64_t max_iterations = kPowerIterationBudget) {
    if (a.rows() != a.cols()) throw Error(Errc::NotSquare, "spectral radius needs a square matrix");
    if (!a.allFinite()) throw Error(Errc::NonFinite, "matrix has non-finite entries");
    if ((a.array() < 0.0).any()) {
        throw Error(Errc::NegativeInput, "power-iteration kernel needs a non-negative matrix");
    }
    SpectralResult result;
    Vec v = Vec::Ones(a.rows());
    const detail::PowerOutcome out = detail::shifted_power(a, v, rel_tol, max_iterations);
    result.iterations = out.iterations;
    result.witness = v;
    if (out.converged) {
        result.value = out.value;
        result.converged = true;
        return result;
    }
    if (a.rows() <= kDenseFallbackMaxDim) {
        SpectralResult dense = spectral_radius_dense(a);
        dense.iterations = out.iterations;
        return dense;
    }
    result.value = out.value;
    return result;
}

/// Spectral extrema over an enumerable set; witnesses are flat member
/// indices, ties resolved to the smallest index.
struct RhoExtrema {
    double rho_min = 0.0;
    double rho_max = 0.0;
    std::uint64_t min_witness = 0;
    std::uint64_t max_witness = 0;
};

inline RhoExtrema rho_extrema(const MatrixSet& set, std::uint64_t limit = kDefaultEnumLimit) {
    if (!set.square()) throw Error(Errc::NotSquare, "spectral extrema need a square set");
    const SetCardinality card = set.cardinality();
    if (card.exceeds(limit)) {
        throw CardinalityOverflowError(limit, "set cardinality exceeds the enumeration limit of " +
                                                  std::to_string(limit));
    }
    RhoExtrema extrema;
    bool first = true;
    for_each_member(set, [&](std::uint64_t flat, const Mat& m) {
        const double rho = spectral_radius(m).value;
        if (first || rho > extrema.rho_max) {
            extrema.rho_max = rho;
            extrema.max_witness = flat;
        }
        if (first || rho < extrema.rho_min) {
            extrema.rho_min = rho;
            extrema.min_witness = flat;
        }
        first = false;
    });
    return extrema;
}

/// Fixed point of greedy row improvement on a positive IRU set: select rows,
/// take the Perron vector of the selected matrix, re-select each row to
/// extremize its inner product with that vector, repeat. Returns the radius
/// of the fixed-point matrix. Always validate against rho_extrema; on
/// NoConvergence fall back to enumeration.
struct IruGreedyResult {
    double value = 0.0;
    std::vector<std::size_t> choices;
    std::uint64_t flat = 0;
    std::uint64_t rounds = 0;
};

inline IruGreedyResult iru_greedy_extremum(const MatrixSet& set, Direction dir,
                                           std::uint64_t max_rounds = 1000) {
    if (set.kind() != SetKind::Iru) {
        throw Error(Errc::ValidationError, "greedy extremum needs an IRU set");
    }
    if (!set.square()) throw Error(Errc::NotSquare, "greedy extremum needs a square set");
    if (set.mode() != Mode::Positive) {
        throw Error(Errc::ValidationError, "greedy extremum needs a positive IRU set");
    }
    const auto& sets = set.row_sets();
    const double sign = dir == Direction::Max ? 1.0 : -1.0;
    std::vector<std::size_t> choice(sets.size(), 0);
    IruGreedyResult result;
    for (std::uint64_t round = 1; round <= max_rounds; ++round) {
        const Mat selected = set.iru_member(choice);
        const SpectralResult sr = spectral_radius(selected);
        bool changed = false;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            std::size_t best = 0;
            double best_dot = sets[i][0].dot(sr.witness);
            for (std::size_t j = 1; j < sets[i].size(); ++j) {
                const double dot = sets[i][j].dot(sr.witness);
                if (sign * dot > sign * best_dot) {
                    best = j;
                    best_dot = dot;
                }
            }
            if (best != choice[i]) changed = true;
            choice[i] = best;
        }
        result.rounds = round;
        if (!changed) {
            result.value = sr.value;
            result.choices = choice;
            result.flat = set.iru_flat(choice);
            return result;
        }
    }
    throw Error(Errc::NoConvergence,
                "greedy row selection did not reach a fixed point in " + std::to_string(max_rounds) + " rounds");
}

// ---------------------------------------------------------------------------
// Brute-force product bounds
// ---------------------------------------------------------------------------

enum class NormKind { One, Inf, Frobenius };

[[nodiscard]] constexpr const char* to_string(NormKind kind) noexcept {
    switch (kind) {
        case NormKind::One: return "one";
        case NormKind::Inf: return "inf";
        case NormKind::Frobenius: return "frobenius";
    }
    return "?";
}

template <class MatT>
[[nodiscard]] double matrix_norm(const MatT& m, NormKind kind) {
    switch (kind) {
        case NormKind::One: return m.cwiseAbs().colwise().sum().maxCoeff();
        case NormKind::Inf: return m.cwiseAbs().rowwise().sum().maxCoeff();
        case NormKind::Frobenius: return m.norm();
    }
    return 0.0;
}

/// Depth-n enumeration bounds. jsr_lower <= jsr(set) <= jsr_upper and
/// lsr(set) <= lsr_upper hold for any norm and any set.
struct BoundReport {
    int depth = 1;
    double jsr_lower = 0.0;  // max over products of rho(P)^{1/n}
    double jsr_upper = 0.0;  // max over products of norm(P)^{1/n}
    double lsr_upper = 0.0;  // min over products of rho(P)^{1/n}
    NormKind norm = NormKind::Inf;
};

namespace detail {

struct BoundsAccum {
    double rho_max_pow = -std::numeric_limits<double>::infinity();
    double rho_min_pow = std::numeric_limits<double>::infinity();
    double norm_max_pow = 0.0;
};

/// Exact extremes of rho over all depth-n products. The probe vector gives a
/// Collatz-Wielandt enclosure per product; an exact radius is computed only
/// when the enclosure says the product could move an extreme, which cannot
/// drop the true argmax/argmin.
template <class MatT>
BoundsAccum bounds_scan(const std::vector<Mat>& members_dyn, int depth, NormKind norm) {
    using VecT = Eigen::Matrix<double, MatT::RowsAtCompileTime, 1>;
    const Index dim = members_dyn.front().rows();
    std::vector<MatT> members(members_dyn.size());
    for (std::size_t k = 0; k < members_dyn.size(); ++k) members[k] = members_dyn[k];

    // Warm the running extremes with the pure member powers; for family sets
    // these are the extremal products, which makes the scan skip nearly
    // everything else. The probe is the dominant eigenvector estimate of the
    // largest pure power, which keeps the enclosure tight exactly where the
    // max-side test is close.
    BoundsAccum warm;
    double best_rho_pow = -1.0;
    Vec probe_dyn = Vec::Ones(dim);
    for (const MatT& m : members) {
        MatT power = m;
        for (int k = 1; k < depth; ++k) power = MatT(m * power);
        VecT vp = VecT::Ones(dim);
        const PowerOutcome po = shifted_power(power, vp, kSpectralRelTol, kPowerIterationBudget);
        const double rho_pow = po.converged ? po.value : spectral_radius_dense(Mat(power)).value;
        warm.rho_max_pow = std::max(warm.rho_max_pow, rho_pow);
        warm.rho_min_pow = std::min(warm.rho_min_pow, rho_pow);
        if (rho_pow > best_rho_pow) {
            best_rho_pow = rho_pow;
            probe_dyn = Vec(vp);
        }
    }
    if (!(probe_dyn.array() > 0.0).all()) probe_dyn = Vec::Ones(dim);

    const VecT probe = probe_dyn;
    // Runs entirely on locals: the per-leaf stores must stay off shared
    // cache lines when threads split the first-choice range.
    const auto scan_range = [&](std::size_t lo, std::size_t hi) -> BoundsAccum {
        BoundsAccum acc = warm;
        double rho_max_pow = acc.rho_max_pow;
        double rho_min_pow = acc.rho_min_pow;
        double norm_max_pow = acc.norm_max_pow;
        VecT u(dim);
        VecT w(dim);
        for_each_product(members, depth, lo, hi, [&](const MatT& product, std::span<const std::size_t>) {
            const double product_norm = matrix_norm(product, norm);
            if (product_norm > norm_max_pow) norm_max_pow = product_norm;
            w.noalias() = product * probe;
            bool open_max = false;
            bool open_min = false;
            for (Index i = 0; i < dim; ++i) {
                if (w(i) > rho_max_pow * probe(i)) open_max = true;
                if (w(i) < rho_min_pow * probe(i)) open_min = true;
            }
            if (!open_max && !open_min) return;
            // Sharpen with a few division-free power steps on the product:
            // after u -> product*u the enclosure contracts, and the open
            // flags only need coordinate comparisons against the running
            // extremes. Eight steps decide all but the near-extremal
            // products, which get an exact radius.
            u = w;
            for (int r = 0; r < 8 && (open_max || open_min); ++r) {
                w.noalias() = product * u;
                if (!w.allFinite()) break;
                if (open_max) {
                    bool above = false;
                    for (Index i = 0; i < dim; ++i) {
                        if (w(i) > rho_max_pow * u(i)) above = true;
                    }
                    open_max = above;
                }
                if (open_min) {
                    bool below = false;
                    for (Index i = 0; i < dim; ++i) {
                        if (w(i) < rho_min_pow * u(i)) below = true;
                    }
                    open_min = below;
                }
                u = w;
            }
            if (open_max || open_min) {
                const double rho = rho_exact(product, VecT(VecT::Ones(dim)));
                if (rho > rho_max_pow) rho_max_pow = rho;
                if (rho < rho_min_pow) rho_min_pow = rho;
            }
        });
        acc.rho_max_pow = rho_max_pow;
        acc.rho_min_pow = rho_min_pow;
        acc.norm_max_pow = norm_max_pow;
        return acc;
    };

    double work = 1.0;
    for (int k = 0; k < depth; ++k) work *= static_cast<double>(members.size());
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(members.size()));
    if (work < 2e5) threads = 1;

    std::vector<BoundsAccum> accums(threads, warm);
    if (threads == 1) {
        accums[0] = scan_range(0, members.size());
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t lo = members.size() * t / threads;
            const std::size_t hi = members.size() * (t + 1) / threads;
            pool.emplace_back([&, lo, hi, t] { accums[t] = scan_range(lo, hi); });
        }
        for (auto& th : pool) th.join();
    }
    BoundsAccum total = warm;
    for (const BoundsAccum& acc : accums) {
        total.rho_max_pow = std::max(total.rho_max_pow, acc.rho_max_pow);
        total.rho_min_pow = std::min(total.rho_min_pow, acc.rho_min_pow);
        total.norm_max_pow = std::max(total.norm_max_pow, acc.norm_max_pow);
    }
    return total;
}

}  // namespace detail

/// Enumerates all products of exactly `depth` members and reports
/// jsr_lower = max rho(P)^{1/n}, jsr_upper = max norm(P)^{1/n} and
/// lsr_upper = min rho(P)^{1/n}.
inline BoundReport product_bounds(const MatrixSet& set, int depth, NormKind norm = NormKind::Inf,
                                  std::uint64_t budget = kDefaultOracleBudget) {
    if (!set.square()) throw Error(Errc::NotSquare, "product bounds need a square set");
    if (depth < 1) throw Error(Errc::ValidationError, "depth must be at least 1");
    const SetCardinality card = set.cardinality();
    std::uint64_t total = 0;
    if (card.overflow || !detail::sequence_count_within(card.value, depth, budget, total)) {
        throw BudgetExceededError(budget, "enumerating all length-" + std::to_string(depth) +
                                              " products exceeds the budget of " + std::to_string(budget));
    }
    const std::vector<Mat> members = enumerate(set, budget);

    detail::BoundsAccum acc;
    switch (set.rows()) {
        case 1: acc = detail::bounds_scan<Eigen::Matrix<double, 1, 1>>(members, depth, norm); break;
        case 2: acc = detail::bounds_scan<Eigen::Matrix2d>(members, depth, norm); break;
        case 3: acc = detail::bounds_scan<Eigen::Matrix3d>(members, depth, norm); break;
        case 4: acc = detail::bounds_scan<Eigen::Matrix4d>(members, depth, norm); break;
        default: acc = detail::bounds_scan<Mat>(members, depth, norm); break;
    }

    BoundReport report;
    report.depth = depth;
    report.norm = norm;
    const double inv_n = 1.0 / static_cast<double>(depth);
    report.jsr_upper = std::pow(acc.norm_max_pow, inv_n);
    report.lsr_upper = std::pow(std::max(acc.rho_min_pow, 0.0), inv_n);
    // rho(P) <= norm(P) holds per product; keep the reported bounds ordered
    // even when both are attained and round differently.
    report.jsr_lower = std::min(std::pow(std::max(acc.rho_max_pow, 0.0), inv_n), report.jsr_upper);
    return report;
}

// ---------------------------------------------------------------------------
// Analysis verdicts
// ---------------------------------------------------------------------------

enum class HsetStatus { VerifiedFamily, SampledPass, Falsified };

[[nodiscard]] constexpr const char* to_string(HsetStatus status) noexcept {
    switch (status) {
        case HsetStatus::VerifiedFamily: return "verified-family";
        case HsetStatus::SampledPass: return "sampled-pass";
        case HsetStatus::Falsified: return "falsified";
    }
    return "?";
}

enum class VerdictBasis { Certified, Sampled, ExtremaOnly };

[[nodiscard]] constexpr const char* to_string(VerdictBasis basis) noexcept {
    switch (basis) {
        case VerdictBasis::Certified: return "certified";
        case VerdictBasis::Sampled: return "sampled";
        case VerdictBasis::ExtremaOnly: return "extrema-only";
    }
    return "?";
}

struct AnalyzeOptions {
    std::uint64_t enum_limit = kDefaultEnumLimit;
    int oracle_depth = 0;  // > 0 attaches product_bounds at that depth
    NormKind norm = NormKind::Inf;
    std::uint64_t hourglass_samples = 1000;
    std::uint64_t seed = 0;
    std::vector<Vec> hourglass_forced_samples;
    bool use_greedy = false;  // positive IRU sets: greedy extrema, cross-checked
    std::uint64_t product_budget = kDefaultOracleBudget;
};

struct GreedyCrossCheck {
    double value_max = 0.0;
    double value_min = 0.0;
    bool validated = false;  // both agree with enumeration within 1e-9
};

struct AnalysisReport {
    double rho_max = 0.0;
    std::uint64_t rho_max_witness = 0;
    double rho_min = 0.0;
    std::uint64_t rho_min_witness = 0;
    bool stable = false;        // rho_max < 1
    bool stabilizable = false;  // rho_min < 1
    HsetStatus hset_status = HsetStatus::SampledPass;
    VerdictBasis basis = VerdictBasis::Sampled;
    std::optional<HourglassWitness> hset_witness;
    std::optional<BoundReport> oracle_bounds;
    std::optional<GreedyCrossCheck> greedy;
    SetCardinality cardinality;
};

/// Full constructive verdict for a square set: spectral extrema and their
/// witnesses, stability/stabilizability flags, the strongest H-set statement
/// the construction supports, and optional brute-force confirmation.
///
/// For a falsified set the flags still report the extrema comparisons, but
/// the basis downgrades to extrema-only: without the hourglass property
/// rho_max < 1 no longer certifies joint-spectral-radius stability.
/// (rho_min < 1 implies stabilizability for any set.)
inline AnalysisReport analyze(const MatrixSet& set, const AnalyzeOptions& opts = {}) {
    if (!set.square()) throw Error(Errc::NotSquare, "analysis needs a square set");
    AnalysisReport report;
    report.cardinality = set.cardinality();

    const RhoExtrema extrema = rho_extrema(set, opts.enum_limit);
    report.rho_max = extrema.rho_max;
    report.rho_max_witness = extrema.max_witness;
    report.rho_min = extrema.rho_min;
    report.rho_min_witness = extrema.min_witness;
    report.stable = extrema.rho_max < 1.0;
    report.stabilizable = extrema.rho_min < 1.0;

    if (opts.use_greedy && set.kind() == SetKind::Iru && set.mode() == Mode::Positive) {
        GreedyCrossCheck check;
        bool ok = true;
        try {
            check.value_max = iru_greedy_extremum(set, Direction::Max).value;
            check.value_min = iru_greedy_extremum(set, Direction::Min).value;
            const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
            check.validated = close(check.value_max, extrema.rho_max) && close(check.value_min, extrema.rho_min);
        } catch (const Error& e) {
            if (e.code() != Errc::NoConvergence) throw;
            ok = false;  // enumeration already provided the extrema
        }
        if (ok) report.greedy = check;
    }

    if (set.hset_by_construction()) {
        report.hset_status = HsetStatus::VerifiedFamily;
        report.basis = VerdictBasis::Certified;
    } else {
        const HourglassVerdict verdict = check_hourglass(set, opts.hourglass_samples, opts.seed,
                                                         opts.hourglass_forced_samples, opts.enum_limit);
        if (verdict.pass) {
            report.hset_status = HsetStatus::SampledPass;
            report.basis = VerdictBasis::Sampled;
        } else {
            report.hset_status = HsetStatus::Falsified;
            report.basis = VerdictBasis::ExtremaOnly;
            report.hset_witness = verdict.witness;
        }
    }

    if (opts.oracle_depth > 0) {
        report.oracle_bounds = product_bounds(set, opts.oracle_depth, opts.norm, opts.product_budget);
    }
    return report;
}

}  // namespace possys
