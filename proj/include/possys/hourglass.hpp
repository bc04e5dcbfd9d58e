#pragma once

// Dominant-matrix selection and sampled checking of the hourglass
// alternative. A set passes the alternative when, for every member image
// y = A~x at a positive probe x, the other images either all sit on one side
// of y or some member image sits strictly on the opposite side. Sets with
// that property admit, for every x > 0, a member whose image dominates all
// others element-wise; selecting it is the building block of extremal
// trajectories.
//
// IRU sets select per row (the row maximizing <row, x>), ordered chains
// select an endpoint; both dominate by construction. Explicit sets are
// handled by verification: the only possible dominant member is one
// maximizing the image sum, so that candidate is checked against every
// member and the check either certifies it or exhibits an incomparable
// pair, which is a witness that the set is not an H-set.

#include "possys/detail/rng.hpp"
#include "possys/errors.hpp"
#include "possys/matrix_set.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace possys {

enum class Axiom { H1, H2 };

[[nodiscard]] constexpr const char* to_string(Axiom a) noexcept { return a == Axiom::H1 ? "H1" : "H2"; }

/// Relative comparison scale used throughout the module.
inline constexpr double kDominanceRelTol = 1e-9;

namespace detail {

inline double rel_scale(double a, double b) noexcept {
    return std::max({1.0, std::abs(a), std::abs(b)});
}

/// u >= v element-wise within relative tolerance.
inline bool ge_tol(const Vec& u, const Vec& v, double rel) {
    for (Index i = 0; i < u.size(); ++i) {
        if (u(i) < v(i) - rel * rel_scale(u(i), v(i))) return false;
    }
    return true;
}

inline bool le_tol(const Vec& u, const Vec& v, double rel) { return ge_tol(v, u, rel); }

/// At least one coordinate differs by more than the relative tolerance.
inline bool neq_tol(const Vec& u, const Vec& v, double rel) {
    for (Index i = 0; i < u.size(); ++i) {
        if (std::abs(u(i) - v(i)) > rel * rel_scale(u(i), v(i))) return true;
    }
    return false;
}

inline void require_positive_probe(const Vec& x, const MatrixSet& set) {
    if (x.size() != set.cols()) {
        throw DimMismatchError("x", "set",
                               "probe vector has length " + std::to_string(x.size()) + ", set needs " +
                                   std::to_string(set.cols()));
    }
    for (Index i = 0; i < x.size(); ++i) {
        if (!(x(i) > 0.0)) {
            throw Error(Errc::NonPositiveVector,
                        "probe vector must be strictly positive, coordinate " + std::to_string(i) + " is " +
                            std::to_string(x(i)));
        }
    }
}

}  // namespace detail

/// Which member dominates at x, with the per-member (or per-row-option)
/// slack of the dominance inequality. For direction max every margin is
/// >= -tol; min mirrors. `margins` is indexed by enumerated member for
/// explicit and ordered sets, and by row set for IRU sets (entry j of
/// margins[i] is the slack of row option j at coordinate i).
struct DominanceCertificate {
    std::uint64_t member = 0;   // flat enumeration index of the chosen matrix
    Vec x;
    Direction direction = Direction::Max;
    Vec image;                  // chosen matrix times x
    std::vector<Vec> margins;
};

namespace detail {

inline DominanceCertificate dominant_impl(const MatrixSet& set, const Vec& x, Direction dir,
                                          std::uint64_t limit) {
    require_positive_probe(x, set);
    const double sign = dir == Direction::Max ? 1.0 : -1.0;

    DominanceCertificate cert;
    cert.x = x;
    cert.direction = dir;

    switch (set.kind()) {
        case SetKind::Iru: {
            const auto& sets = set.row_sets();
            std::vector<std::size_t> choice(sets.size());
            cert.image.resize(set.rows());
            cert.margins.reserve(sets.size());
            for (std::size_t i = 0; i < sets.size(); ++i) {
                Vec dots(static_cast<Index>(sets[i].size()));
                for (std::size_t j = 0; j < sets[i].size(); ++j) dots(static_cast<Index>(j)) = sets[i][j].dot(x);
                Index best = 0;
                for (Index j = 1; j < dots.size(); ++j) {
                    if (sign * dots(j) > sign * dots(best)) best = j;  // ties keep the lowest index
                }
                choice[i] = static_cast<std::size_t>(best);
                cert.image(static_cast<Index>(i)) = dots(best);
                cert.margins.push_back(sign * (Vec::Constant(dots.size(), dots(best)) - dots));
            }
            cert.member = set.iru_flat(choice);
            return cert;
        }
        case SetKind::Ordered: {
            const auto& chain = set.members();
            const std::size_t pick = dir == Direction::Max ? chain.size() - 1 : 0;
            cert.member = pick;
            cert.image = chain[pick] * x;
            cert.margins.reserve(chain.size());
            for (const Mat& m : chain) cert.margins.push_back(sign * (cert.image - m * x));
            return cert;
        }
        case SetKind::Explicit: {
            const std::vector<Mat>& ms = enumerate(set, limit);
            std::vector<Vec> images(ms.size());
            for (std::size_t k = 0; k < ms.size(); ++k) images[k] = ms[k] * x;
            // A dominant member maximizes (minimizes) every monotone aggregate
            // of the image, so the image-sum extremizer is the only candidate.
            std::size_t cand = 0;
            for (std::size_t k = 1; k < ms.size(); ++k) {
                if (sign * images[k].sum() > sign * images[cand].sum()) cand = k;
            }
            for (std::size_t k = 0; k < ms.size(); ++k) {
                for (Index i = 0; i < images[k].size(); ++i) {
                    const double gap = sign * (images[cand](i) - images[k](i));
                    if (gap < -kDominanceRelTol * rel_scale(images[cand](i), images[k](i))) {
                        throw NoDominantMatrixError(
                            x, cand, k, i,
                            "no member image dominates at the probe vector (members " + std::to_string(cand) +
                                " and " + std::to_string(k) + " are incomparable at coordinate " + std::to_string(i) +
                                ")");
                    }
                }
            }
            cert.member = cand;
            cert.image = images[cand];
            cert.margins.reserve(ms.size());
            for (std::size_t k = 0; k < ms.size(); ++k) cert.margins.push_back(sign * (images[cand] - images[k]));
            return cert;
        }
    }
    throw Error(Errc::MalformedGraph, "unknown set kind");
}

}  // namespace detail

/// Member whose image of x dominates every member image element-wise.
inline DominanceCertificate dominant_max(const MatrixSet& set, const Vec& x,
                                         std::uint64_t limit = kDefaultEnumLimit) {
    return detail::dominant_impl(set, x, Direction::Max, limit);
}

/// Member whose image of x is dominated by every member image element-wise.
inline DominanceCertificate dominant_min(const MatrixSet& set, const Vec& x,
                                         std::uint64_t limit = kDefaultEnumLimit) {
    return detail::dominant_impl(set, x, Direction::Min, limit);
}

struct HourglassWitness {
    Vec x;
    std::uint64_t member = 0;  // the member whose image breaks the alternative
    Axiom axiom = Axiom::H1;
};

/// Outcome of sampled H1/H2 checking. A pass is evidence, never a
/// certificate: the axioms quantify over all x > 0 and only a violation is
/// conclusive.
struct HourglassVerdict {
    bool pass = true;
    std::uint64_t samples_tested = 0;
    std::optional<HourglassWitness> witness;
};

/// Tests H1 and H2 on `forced_samples` followed by `n_samples` seeded
/// log-uniform probes. Stops at the first violation; the witness reported is
/// the one with the smallest sample index, then the smallest member index.
inline HourglassVerdict check_hourglass(const MatrixSet& set, std::uint64_t n_samples, std::uint64_t seed,
                                        const std::vector<Vec>& forced_samples = {},
                                        std::uint64_t limit = kDefaultEnumLimit) {
    const std::vector<Mat> ms = enumerate(set, limit);
    std::vector<Vec> images(ms.size());
    std::mt19937_64 rng(seed);
    HourglassVerdict verdict;

    const std::uint64_t total = n_samples + forced_samples.size();
    for (std::uint64_t s = 0; s < total; ++s) {
        Vec x = s < forced_samples.size() ? forced_samples[static_cast<std::size_t>(s)]
                                          : detail::log_uniform_vector(rng, set.cols());
        detail::require_positive_probe(x, set);
        for (std::size_t k = 0; k < ms.size(); ++k) images[k] = ms[k] * x;
        ++verdict.samples_tested;

        for (std::size_t t = 0; t < ms.size(); ++t) {
            bool all_ge = true;
            bool all_le = true;
            for (std::size_t k = 0; k < ms.size(); ++k) {
                if (!detail::ge_tol(images[k], images[t], kDominanceRelTol)) all_ge = false;
                if (!detail::le_tol(images[k], images[t], kDominanceRelTol)) all_le = false;
                if (!all_ge && !all_le) break;
            }
            const auto fails = [&](Axiom axiom) {
                const bool below = axiom == Axiom::H1;
                const bool one_sided = below ? all_ge : all_le;
                if (one_sided) return false;
                for (std::size_t k = 0; k < ms.size(); ++k) {
                    const bool on_other_side = below ? detail::le_tol(images[k], images[t], kDominanceRelTol)
                                                     : detail::ge_tol(images[k], images[t], kDominanceRelTol);
                    if (on_other_side && detail::neq_tol(images[k], images[t], kDominanceRelTol)) return false;
                }
                return true;
            };
            for (Axiom axiom : {Axiom::H1, Axiom::H2}) {
                if (fails(axiom)) {
                    verdict.pass = false;
                    verdict.witness = HourglassWitness{std::move(x), static_cast<std::uint64_t>(t), axiom};
                    return verdict;
                }
            }
        }
    }
    return verdict;
}

}  // namespace possys
