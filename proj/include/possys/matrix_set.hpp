#pragma once

// Matrix-set representations for positive switching systems: explicit lists,
// sets with independent row uncertainty (one row set per matrix row, members
// are all row combinations), and element-wise linearly ordered chains.
// All values are immutable after construction and validated on entry.

#include "possys/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace possys {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
using Index = Eigen::Index;

enum class Mode { Positive, NonNegative };

enum class SetKind { Explicit, Iru, Ordered };

enum class Direction { Max, Min };

[[nodiscard]] constexpr const char* to_string(Direction d) noexcept {
    return d == Direction::Max ? "max" : "min";
}

[[nodiscard]] constexpr const char* to_string(Mode mode) noexcept {
    return mode == Mode::Positive ? "positive" : "non-negative";
}

[[nodiscard]] constexpr const char* to_string(SetKind kind) noexcept {
    switch (kind) {
        case SetKind::Explicit: return "explicit";
        case SetKind::Iru: return "iru";
        case SetKind::Ordered: return "ordered";
    }
    return "unknown";
}

/// Exact member count; `overflow` is set when the IRU row-set size product
/// does not fit in 64 bits.
struct SetCardinality {
    std::uint64_t value = 0;
    bool overflow = false;

    [[nodiscard]] bool exceeds(std::uint64_t limit) const noexcept { return overflow || value > limit; }
};

inline constexpr std::uint64_t kDefaultEnumLimit = 1'000'000;

namespace detail {

inline bool entry_ok(double v, Mode mode) noexcept {
    return mode == Mode::Positive ? v > 0.0 : v >= 0.0;
}

inline void check_finite_and_mode(const Mat& m, Mode mode, std::size_t member) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (!std::isfinite(v)) {
                throw Error(Errc::NonFinite, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                                 ") of matrix " + std::to_string(member) + " is not finite");
            }
            if (!entry_ok(v, mode)) {
                throw ModeViolationError(member, i, j,
                                         "entry (" + std::to_string(i) + "," + std::to_string(j) + ") of matrix " +
                                             std::to_string(member) + " violates " + to_string(mode) + " mode");
            }
        }
    }
}

}  // namespace detail

struct ExplicitRep {
    std::vector<Mat> members;
};

struct IruRep {
    std::vector<std::vector<RowVec>> row_sets;  // row_sets[i] holds the options for row i
};

struct OrderedRep {
    std::vector<Mat> chain;  // element-wise increasing
};

class MatrixSet {
public:
    [[nodiscard]] SetKind kind() const noexcept {
        if (std::holds_alternative<ExplicitRep>(rep_)) return SetKind::Explicit;
        if (std::holds_alternative<IruRep>(rep_)) return SetKind::Iru;
        return SetKind::Ordered;
    }

    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    [[nodiscard]] Index rows() const noexcept { return rows_; }
    [[nodiscard]] Index cols() const noexcept { return cols_; }
    [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

    /// True when the set is an IRU or ordered set by construction, or was
    /// produced from such sets by Minkowski sums/products and positive
    /// scalings only. For these sets the joint (lower) spectral radius equals
    /// the largest (smallest) member spectral radius, so stability verdicts
    /// are certificates rather than sampled evidence.
    [[nodiscard]] bool hset_by_construction() const noexcept { return hset_by_construction_; }

    [[nodiscard]] SetCardinality cardinality() const noexcept {
        SetCardinality c;
        if (const auto* e = std::get_if<ExplicitRep>(&rep_)) {
            c.value = e->members.size();
        } else if (const auto* o = std::get_if<OrderedRep>(&rep_)) {
            c.value = o->chain.size();
        } else {
            const auto& iru = std::get<IruRep>(rep_);
            c.value = 1;
            for (const auto& options : iru.row_sets) {
                if (__builtin_mul_overflow(c.value, static_cast<std::uint64_t>(options.size()), &c.value)) {
                    c.overflow = true;
                    c.value = 0;
                    return c;
                }
            }
        }
        return c;
    }

    /// Stored member list (explicit and ordered sets only).
    [[nodiscard]] const std::vector<Mat>& members() const {
        if (const auto* e = std::get_if<ExplicitRep>(&rep_)) return e->members;
        return std::get<OrderedRep>(rep_).chain;
    }

    [[nodiscard]] const std::vector<std::vector<RowVec>>& row_sets() const { return std::get<IruRep>(rep_).row_sets; }

    /// Member by flat enumeration index. IRU members are indexed
    /// lexicographically in their row choices, first row outermost.
    [[nodiscard]] Mat member_at(std::uint64_t flat) const {
        if (kind() != SetKind::Iru) return members()[static_cast<std::size_t>(flat)];
        const auto& sets = row_sets();
        Mat m(rows_, cols_);
        std::uint64_t rem = flat;
        for (std::size_t i = sets.size(); i-- > 0;) {
            const std::uint64_t k = sets[i].size();
            m.row(static_cast<Index>(i)) = sets[i][static_cast<std::size_t>(rem % k)];
            rem /= k;
        }
        return m;
    }

    /// Row choices of an IRU member, decoded from its flat index.
    [[nodiscard]] std::vector<std::size_t> iru_choices(std::uint64_t flat) const {
        const auto& sets = row_sets();
        std::vector<std::size_t> choice(sets.size());
        for (std::size_t i = sets.size(); i-- > 0;) {
            const std::uint64_t k = sets[i].size();
            choice[i] = static_cast<std::size_t>(flat % k);
            flat /= k;
        }
        return choice;
    }

    [[nodiscard]] std::uint64_t iru_flat(std::span<const std::size_t> choices) const {
        const auto& sets = row_sets();
        std::uint64_t flat = 0;
        for (std::size_t i = 0; i < sets.size(); ++i) flat = flat * sets[i].size() + choices[i];
        return flat;
    }

    [[nodiscard]] Mat iru_member(std::span<const std::size_t> choices) const {
        const auto& sets = row_sets();
        Mat m(rows_, cols_);
        for (std::size_t i = 0; i < sets.size(); ++i) m.row(static_cast<Index>(i)) = sets[i][choices[i]];
        return m;
    }

private:
    MatrixSet(std::variant<ExplicitRep, IruRep, OrderedRep> rep, Mode mode, Index rows, Index cols, bool family)
        : rep_(std::move(rep)), mode_(mode), rows_(rows), cols_(cols), hset_by_construction_(family) {}

    friend MatrixSet make_explicit(std::vector<Mat>, Mode);
    friend MatrixSet make_iru(std::vector<std::vector<RowVec>>, Mode);
    friend MatrixSet make_ordered(std::vector<Mat>, Mode);
    friend MatrixSet scale(double, const MatrixSet&);
    friend MatrixSet mink_add(const MatrixSet&, const MatrixSet&, std::uint64_t);
    friend MatrixSet mink_mul(const MatrixSet&, const MatrixSet&, std::uint64_t);

    std::variant<ExplicitRep, IruRep, OrderedRep> rep_;
    Mode mode_;
    Index rows_;
    Index cols_;
    bool hset_by_construction_;
};

/// Explicit finite set of matrices sharing dimensions and mode.
inline MatrixSet make_explicit(std::vector<Mat> matrices, Mode mode) {
    if (matrices.empty()) throw Error(Errc::EmptySet, "explicit set needs at least one matrix");
    const Index rows = matrices.front().rows();
    const Index cols = matrices.front().cols();
    if (rows < 1 || cols < 1) throw Error(Errc::EmptySet, "matrices must have at least one row and column");
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        if (matrices[k].rows() != rows || matrices[k].cols() != cols) {
            throw DimMismatchError("matrix 0", "matrix " + std::to_string(k),
                                   "explicit set members must share dimensions");
        }
        detail::check_finite_and_mode(matrices[k], mode, k);
    }
    return MatrixSet(ExplicitRep{std::move(matrices)}, mode, rows, cols, /*family=*/false);
}

/// Set with independent row uncertainty: row i of a member is any element of
/// `row_sets[i]`. Cardinality is the product of the row-set sizes.
inline MatrixSet make_iru(std::vector<std::vector<RowVec>> row_sets, Mode mode) {
    if (row_sets.empty()) throw Error(Errc::EmptySet, "IRU set needs at least one row set");
    Index cols = -1;
    for (std::size_t i = 0; i < row_sets.size(); ++i) {
        if (row_sets[i].empty()) throw Error(Errc::EmptyRowSet, "row set " + std::to_string(i) + " is empty");
        for (std::size_t j = 0; j < row_sets[i].size(); ++j) {
            const RowVec& r = row_sets[i][j];
            if (cols < 0) cols = r.cols();
            if (r.cols() != cols || cols < 1) {
                throw Error(Errc::RaggedRows, "row " + std::to_string(j) + " of row set " + std::to_string(i) +
                                                  " has length " + std::to_string(r.cols()) + ", expected " +
                                                  std::to_string(cols));
            }
            for (Index c = 0; c < cols; ++c) {
                if (!std::isfinite(r(c))) {
                    throw Error(Errc::NonFinite, "row set " + std::to_string(i) + ", option " + std::to_string(j) +
                                                     ", entry " + std::to_string(c) + " is not finite");
                }
                if (!detail::entry_ok(r(c), mode)) {
                    throw ModeViolationError(j, static_cast<Index>(i), c,
                                             "row set " + std::to_string(i) + ", option " + std::to_string(j) +
                                                 ", entry " + std::to_string(c) + " violates " + to_string(mode) +
                                                 " mode");
                }
            }
        }
    }
    const Index rows = static_cast<Index>(row_sets.size());
    return MatrixSet(IruRep{std::move(row_sets)}, mode, rows, cols, /*family=*/true);
}

/// Linearly ordered chain: element-wise strictly increasing in positive mode,
/// non-decreasing in non-negative mode. Adjacent pairs suffice by
/// transitivity. Comparison is exact; inputs are user-given constants.
inline MatrixSet make_ordered(std::vector<Mat> matrices, Mode mode) {
    if (matrices.empty()) throw Error(Errc::EmptySet, "ordered set needs at least one matrix");
    const Index rows = matrices.front().rows();
    const Index cols = matrices.front().cols();
    if (rows < 1 || cols < 1) throw Error(Errc::EmptySet, "matrices must have at least one row and column");
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        if (matrices[k].rows() != rows || matrices[k].cols() != cols) {
            throw DimMismatchError("matrix 0", "matrix " + std::to_string(k),
                                   "ordered set members must share dimensions");
        }
        detail::check_finite_and_mode(matrices[k], mode, k);
    }
    for (std::size_t k = 0; k + 1 < matrices.size(); ++k) {
        for (Index i = 0; i < rows; ++i) {
            for (Index j = 0; j < cols; ++j) {
                const double lo = matrices[k](i, j);
                const double hi = matrices[k + 1](i, j);
                const bool ok = mode == Mode::Positive ? lo < hi : lo <= hi;
                if (!ok) {
                    throw ChainViolationError(k + 1, i, j,
                                              "chain pair (" + std::to_string(k + 1) + "," + std::to_string(k + 2) +
                                                  ") violates the element-wise order at entry (" + std::to_string(i) +
                                                  "," + std::to_string(j) + ")");
                }
            }
        }
    }
    return MatrixSet(OrderedRep{std::move(matrices)}, mode, rows, cols, /*family=*/true);
}

/// Visits every member in flat enumeration order without materializing the
/// list. `fn(flat_index, matrix)` is called cardinality() times.
template <class Fn>
void for_each_member(const MatrixSet& set, Fn&& fn) {
    if (set.kind() != SetKind::Iru) {
        const auto& ms = set.members();
        for (std::size_t k = 0; k < ms.size(); ++k) fn(static_cast<std::uint64_t>(k), ms[k]);
        return;
    }
    const auto& sets = set.row_sets();
    const std::size_t n = sets.size();
    std::vector<std::size_t> choice(n, 0);
    Mat m(set.rows(), set.cols());
    for (std::size_t i = 0; i < n; ++i) m.row(static_cast<Index>(i)) = sets[i][0];
    std::uint64_t flat = 0;
    while (true) {
        fn(flat, m);
        ++flat;
        // odometer increment, last row fastest
        std::size_t i = n;
        while (i-- > 0) {
            if (++choice[i] < sets[i].size()) {
                m.row(static_cast<Index>(i)) = sets[i][choice[i]];
                break;
            }
            choice[i] = 0;
            m.row(static_cast<Index>(i)) = sets[i][0];
            if (i == 0) return;
        }
    }
}

/// All members as a list, in flat enumeration order.
inline std::vector<Mat> enumerate(const MatrixSet& set, std::uint64_t limit = kDefaultEnumLimit) {
    const SetCardinality card = set.cardinality();
    if (card.exceeds(limit)) {
        throw CardinalityOverflowError(limit, "set has " +
                                                  (card.overflow ? std::string("more than 2^64")
                                                                 : std::to_string(card.value)) +
                                                  " members, limit " + std::to_string(limit));
    }
    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(card.value));
    for_each_member(set, [&](std::uint64_t, const Mat& m) { out.push_back(m); });
    return out;
}

}  // namespace possys
