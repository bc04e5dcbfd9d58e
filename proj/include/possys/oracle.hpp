#pragma once

// Brute-force reference computations. Everything here is deliberately
// shortcut-free: these routines are the independent side of every
// constructive claim made elsewhere, so they enumerate and nothing more.
//
// Products multiply newest-first: the index tuple (s1, ..., sn) denotes
// A_{sn} ... A_{s1}, the matrix that maps x0 to x_n when member s_k is
// applied at step k. Tuples are visited in lexicographic order.

#include "possys/errors.hpp"
#include "possys/matrix_set.hpp"
#include "possys/objective.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace possys {

inline constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

namespace detail {

/// K^n if it stays within `cap`, otherwise nullopt semantics via bool.
inline bool sequence_count_within(std::uint64_t k, int n, std::uint64_t cap, std::uint64_t& out) {
    out = 1;
    for (int i = 0; i < n; ++i) {
        if (k != 0 && out > cap / k) return false;
        out *= k;
    }
    return out <= cap;
}

}  // namespace detail

/// Visits every ordered product of exactly `depth` members, restricted to
/// first choices s1 in [first_begin, first_end). The visitor receives the
/// product and its index tuple; prefixes are reused between neighbours, so
/// each visit costs one matrix multiply.
template <class MatT, class Visitor>
void for_each_product(const std::vector<MatT>& members, int depth, std::size_t first_begin,
                      std::size_t first_end, Visitor&& visit) {
    const std::size_t count = members.size();
    if (depth < 1 || count == 0 || first_begin >= first_end) return;
    std::vector<std::size_t> seq(static_cast<std::size_t>(depth), 0);
    std::vector<MatT> prefix(static_cast<std::size_t>(depth) + 1);
    seq[0] = first_begin;
    prefix[1] = members[seq[0]];
    for (int k = 1; k < depth; ++k) prefix[k + 1] = members[0] * prefix[k];
    while (true) {
        visit(static_cast<const MatT&>(prefix[static_cast<std::size_t>(depth)]),
              std::span<const std::size_t>(seq));
        int pos = depth - 1;
        while (true) {
            ++seq[static_cast<std::size_t>(pos)];
            const std::size_t wrap = pos == 0 ? first_end : count;
            if (seq[static_cast<std::size_t>(pos)] < wrap) break;
            if (pos == 0) return;
            seq[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        for (int k = pos; k < depth; ++k) {
            if (k == 0) {
                prefix[1] = members[seq[0]];
            } else {
                prefix[k + 1] = members[seq[static_cast<std::size_t>(k)]] * prefix[k];
            }
        }
    }
}

template <class MatT, class Visitor>
void for_each_product(const std::vector<MatT>& members, int depth, Visitor&& visit) {
    for_each_product(members, depth, 0, members.size(), visit);
}

/// All ordered length-n products with their index tuples, materialized.
inline std::vector<std::pair<Mat, std::vector<std::size_t>>> exhaustive_products(
    const MatrixSet& set, int n, std::uint64_t budget = kDefaultOracleBudget) {
    const SetCardinality card = set.cardinality();
    std::uint64_t total = 0;
    if (card.overflow || !detail::sequence_count_within(card.value, n, budget, total)) {
        throw BudgetExceededError(budget, "enumerating all length-" + std::to_string(n) +
                                              " products exceeds the budget of " + std::to_string(budget));
    }
    const std::vector<Mat> members = enumerate(set, budget);
    std::vector<std::pair<Mat, std::vector<std::size_t>>> out;
    out.reserve(static_cast<std::size_t>(total));
    for_each_product(members, n, [&](const Mat& product, std::span<const std::size_t> seq) {
        out.emplace_back(product, std::vector<std::size_t>(seq.begin(), seq.end()));
    });
    return out;
}

/// Result of exhaustive sequence search. `best_sequence` lists member
/// indices in application order and is the lexicographically smallest
/// optimum; `frontier[k-1]`, when requested, is the extremal objective value
/// over all length-k prefixes.
struct ExhaustiveResult {
    double best_value = 0.0;
    std::vector<std::size_t> best_sequence;
    std::uint64_t sequences_examined = 0;
    std::vector<double> frontier;
};

/// Exact extremum of nu(A_{sn} ... A_{s1} x0) over all member sequences of
/// length n, by depth-first enumeration with a stack of n partial states.
inline ExhaustiveResult exhaustive_extremum(const MatrixSet& set, const Vec& x0, int n,
                                            const MonotoneObjective& obj, Direction dir,
                                            std::uint64_t budget = kDefaultOracleBudget,
                                            bool with_frontier = false) {
    if (!set.square()) throw Error(Errc::NotSquare, "sequence search needs a square set");
    if (n < 1) throw Error(Errc::ValidationError, "sequence length must be at least 1");
    if (x0.size() != set.cols() || (x0.array() <= 0.0).any()) {
        throw Error(Errc::NonPositiveVector, "x0 must be strictly positive and match the set dimension");
    }
    const SetCardinality card = set.cardinality();
    std::uint64_t total = 0;
    if (card.overflow || !detail::sequence_count_within(card.value, n, budget, total)) {
        throw BudgetExceededError(budget, "searching all " + std::to_string(card.value) + "^" + std::to_string(n) +
                                              " sequences exceeds the budget of " + std::to_string(budget));
    }
    const std::vector<Mat> members = enumerate(set, budget);
    const std::size_t count = members.size();
    const double sign = dir == Direction::Max ? 1.0 : -1.0;

    std::vector<std::size_t> seq(static_cast<std::size_t>(n), 0);
    std::vector<Vec> states(static_cast<std::size_t>(n) + 1);
    states[0] = x0;

    ExhaustiveResult result;
    if (with_frontier) {
        result.frontier.assign(static_cast<std::size_t>(n), sign < 0 ? std::numeric_limits<double>::infinity()
                                                                     : -std::numeric_limits<double>::infinity());
    }
    const auto advance_states = [&](int from) {
        for (int k = from; k < n; ++k) {
            states[k + 1] = members[seq[static_cast<std::size_t>(k)]] * states[k];
            if (with_frontier) {
                const double v = nu_eval(obj, states[k + 1]);
                double& slot = result.frontier[static_cast<std::size_t>(k)];
                if (sign * v > sign * slot) slot = v;
            }
        }
    };
    advance_states(0);

    bool first = true;
    while (true) {
        const double value = nu_eval(obj, states[static_cast<std::size_t>(n)]);
        ++result.sequences_examined;
        if (first || sign * value > sign * result.best_value) {
            result.best_value = value;
            result.best_sequence = seq;
            first = false;
        }
        int pos = n - 1;
        while (pos >= 0 && ++seq[static_cast<std::size_t>(pos)] == count) {
            seq[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        advance_states(pos);
    }
    return result;
}

}  // namespace possys
