#pragma once

// Minkowski set algebra and series-parallel composition. Sums and products
// materialize explicit sets (row-uncertainty structure does not survive
// them); duplicates are removed by exact bitwise entry equality so the set
// semantics never depend on a tolerance. Expressions are evaluated
// structurally, with no distribution or factoring: the Minkowski operations
// do not distribute, so rewriting would change the value.

#include "possys/errors.hpp"
#include "possys/matrix_set.hpp"

#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace possys {

/// positive op positive stays positive; anything else is only non-negative.
[[nodiscard]] constexpr Mode mode_join(Mode a, Mode b) noexcept {
    return (a == Mode::Positive && b == Mode::Positive) ? Mode::Positive : Mode::NonNegative;
}

namespace detail {

inline std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t mat_hash(const Mat& m) {
    return fnv1a(reinterpret_cast<const unsigned char*>(m.data()), sizeof(double) * static_cast<std::size_t>(m.size()));
}

inline bool mat_bits_equal(const Mat& a, const Mat& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

/// Appends m unless a bitwise-equal member is already present. First
/// occurrence order is preserved.
class DedupBuilder {
public:
    void push(Mat m) {
        const std::uint64_t h = mat_hash(m);
        auto [it, inserted] = buckets_.try_emplace(h);
        for (std::size_t idx : it->second) {
            if (mat_bits_equal(members_[idx], m)) return;
        }
        it->second.push_back(members_.size());
        members_.push_back(std::move(m));
    }

    std::vector<Mat> take() { return std::move(members_); }

private:
    std::vector<Mat> members_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

inline void check_pairwise_limit(const MatrixSet& s, const MatrixSet& t, std::uint64_t limit) {
    const SetCardinality cs = s.cardinality();
    const SetCardinality ct = t.cardinality();
    std::uint64_t pairs = 0;
    if (cs.overflow || ct.overflow || __builtin_mul_overflow(cs.value, ct.value, &pairs) || pairs > limit) {
        throw CardinalityOverflowError(limit, "materializing up to " +
                                                  (cs.overflow || ct.overflow ? std::string("2^64")
                                                                              : std::to_string(pairs)) +
                                                  " pairwise results exceeds the limit of " + std::to_string(limit));
    }
}

}  // namespace detail

/// All pairwise sums {A + B}. Operands must share dimensions.
inline MatrixSet mink_add(const MatrixSet& s, const MatrixSet& t,
                          std::uint64_t limit = kDefaultEnumLimit) {
    if (s.rows() != t.rows() || s.cols() != t.cols()) {
        throw DimMismatchError(
            "left", "right",
            "Minkowski sum needs equal dimensions, got " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                " and " + std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
    }
    detail::check_pairwise_limit(s, t, limit);
    const std::vector<Mat> left = enumerate(s, limit);
    const std::vector<Mat> right = enumerate(t, limit);
    detail::DedupBuilder out;
    for (const Mat& a : left) {
        for (const Mat& b : right) out.push(a + b);
    }
    MatrixSet result = make_explicit(out.take(), mode_join(s.mode(), t.mode()));
    result.hset_by_construction_ = s.hset_by_construction() && t.hset_by_construction();
    return result;
}

/// All pairwise products {A B}. Inner dimensions must match.
inline MatrixSet mink_mul(const MatrixSet& s, const MatrixSet& t,
                          std::uint64_t limit = kDefaultEnumLimit) {
    if (s.cols() != t.rows()) {
        throw DimMismatchError(
            "left", "right",
            "Minkowski product needs inner dimensions to match, got " + std::to_string(s.rows()) + "x" +
                std::to_string(s.cols()) + " times " + std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
    }
    detail::check_pairwise_limit(s, t, limit);
    const std::vector<Mat> left = enumerate(s, limit);
    const std::vector<Mat> right = enumerate(t, limit);
    detail::DedupBuilder out;
    for (const Mat& a : left) {
        for (const Mat& b : right) out.push(a * b);
    }
    MatrixSet result = make_explicit(out.take(), mode_join(s.mode(), t.mode()));
    result.hset_by_construction_ = s.hset_by_construction() && t.hset_by_construction();
    return result;
}

/// {t A} for t > 0, preserving the representation: row sets, chains and
/// member lists are scaled in place.
inline MatrixSet scale(double t, const MatrixSet& s) {
    if (!(t > 0.0)) throw Error(Errc::NonPositiveScalar, "scale factor must be > 0, got " + std::to_string(t));
    MatrixSet result = s;
    if (auto* e = std::get_if<ExplicitRep>(&result.rep_)) {
        for (Mat& m : e->members) m *= t;
    } else if (auto* o = std::get_if<OrderedRep>(&result.rep_)) {
        for (Mat& m : o->chain) m *= t;
    } else {
        for (auto& options : std::get<IruRep>(result.rep_).row_sets) {
            for (RowVec& r : options) r *= t;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Composition expressions
// ---------------------------------------------------------------------------

/// Immutable expression over named block sets: references, Minkowski sums and
/// products, positive scalings. Shared subtrees are fine; nodes never mutate.
class CompositionExpr {
public:
    enum class Op { Ref, Add, Mul, Scale };

    static CompositionExpr ref(std::string name) {
        return CompositionExpr(std::make_shared<const Node>(Node{Op::Ref, std::move(name), 0.0, nullptr, nullptr}));
    }
    static CompositionExpr add(CompositionExpr l, CompositionExpr r) {
        return CompositionExpr(std::make_shared<const Node>(Node{Op::Add, {}, 0.0, l.node_, r.node_}));
    }
    static CompositionExpr mul(CompositionExpr l, CompositionExpr r) {
        return CompositionExpr(std::make_shared<const Node>(Node{Op::Mul, {}, 0.0, l.node_, r.node_}));
    }
    static CompositionExpr scaled(double t, CompositionExpr child) {
        if (!(t > 0.0)) {
            throw Error(Errc::NonPositiveScalar, "scale coefficient must be > 0, got " + std::to_string(t));
        }
        return CompositionExpr(std::make_shared<const Node>(Node{Op::Scale, {}, t, child.node_, nullptr}));
    }

    [[nodiscard]] Op op() const noexcept { return node_->op; }
    [[nodiscard]] const std::string& name() const noexcept { return node_->name; }
    [[nodiscard]] double factor() const noexcept { return node_->factor; }
    [[nodiscard]] CompositionExpr left() const { return CompositionExpr(node_->left); }
    [[nodiscard]] CompositionExpr right() const { return CompositionExpr(node_->right); }
    [[nodiscard]] CompositionExpr child() const { return CompositionExpr(node_->left); }

    /// Structural equality (same shape, names and factors).
    [[nodiscard]] bool equals(const CompositionExpr& other) const {
        if (node_ == other.node_) return true;
        if (node_->op != other.node_->op) return false;
        switch (node_->op) {
            case Op::Ref: return node_->name == other.node_->name;
            case Op::Scale: return node_->factor == other.node_->factor && child().equals(other.child());
            default: return left().equals(other.left()) && right().equals(other.right());
        }
    }

private:
    struct Node {
        Op op;
        std::string name;    // Ref
        double factor;       // Scale
        std::shared_ptr<const Node> left;   // Add/Mul left, Scale child
        std::shared_ptr<const Node> right;  // Add/Mul right
    };

    explicit CompositionExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

/// Compact rendering used in diagnostics, e.g. "(A3*(A1+A2)+A4)".
inline std::string to_string(const CompositionExpr& e) {
    switch (e.op()) {
        case CompositionExpr::Op::Ref: return e.name();
        case CompositionExpr::Op::Add: return "(" + to_string(e.left()) + "+" + to_string(e.right()) + ")";
        case CompositionExpr::Op::Mul: return "(" + to_string(e.left()) + "*" + to_string(e.right()) + ")";
        case CompositionExpr::Op::Scale: return std::to_string(e.factor()) + "*" + to_string(e.child());
    }
    return "?";
}

using BlockEnv = std::map<std::string, MatrixSet>;

/// Dimensions an expression evaluates to, without materializing anything.
inline std::pair<Index, Index> expr_dims(const CompositionExpr& e, const BlockEnv& env) {
    switch (e.op()) {
        case CompositionExpr::Op::Ref: {
            auto it = env.find(e.name());
            if (it == env.end()) throw Error(Errc::UnboundRef, "no block named '" + e.name() + "'");
            return {it->second.rows(), it->second.cols()};
        }
        case CompositionExpr::Op::Scale:
            return expr_dims(e.child(), env);
        case CompositionExpr::Op::Add: {
            const auto l = expr_dims(e.left(), env);
            const auto r = expr_dims(e.right(), env);
            if (l != r) {
                throw DimMismatchError(to_string(e.left()), to_string(e.right()),
                                       "sum operands " + to_string(e.left()) + " (" + std::to_string(l.first) + "x" +
                                           std::to_string(l.second) + ") and " + to_string(e.right()) + " (" +
                                           std::to_string(r.first) + "x" + std::to_string(r.second) +
                                           ") differ in dimensions");
            }
            return l;
        }
        case CompositionExpr::Op::Mul: {
            const auto l = expr_dims(e.left(), env);
            const auto r = expr_dims(e.right(), env);
            if (l.second != r.first) {
                throw DimMismatchError(to_string(e.left()), to_string(e.right()),
                                       "product operands " + to_string(e.left()) + " (" + std::to_string(l.first) +
                                           "x" + std::to_string(l.second) + ") and " + to_string(e.right()) + " (" +
                                           std::to_string(r.first) + "x" + std::to_string(r.second) +
                                           ") have mismatched inner dimensions");
            }
            return {l.first, r.second};
        }
    }
    throw Error(Errc::MalformedGraph, "unknown expression node");
}

/// Evaluates the expression bottom-up over the bound sets. References pass
/// their set through unchanged (an IRU block stays IRU), scalings preserve
/// the representation, sums and products materialize explicit sets.
inline MatrixSet eval_poly(const CompositionExpr& e, const BlockEnv& env,
                           std::uint64_t limit = kDefaultEnumLimit) {
    expr_dims(e, env);  // full dimension check up front
    switch (e.op()) {
        case CompositionExpr::Op::Ref:
            return env.at(e.name());
        case CompositionExpr::Op::Scale:
            return scale(e.factor(), eval_poly(e.child(), env, limit));
        case CompositionExpr::Op::Add:
            return mink_add(eval_poly(e.left(), env, limit), eval_poly(e.right(), env, limit), limit);
        case CompositionExpr::Op::Mul:
            return mink_mul(eval_poly(e.left(), env, limit), eval_poly(e.right(), env, limit), limit);
    }
    throw Error(Errc::MalformedGraph, "unknown expression node");
}

// ---------------------------------------------------------------------------
// Series-parallel block graphs
// ---------------------------------------------------------------------------

/// Recursive series-parallel structure with named blocks on the edges.
/// Series parts are listed in signal order: the state passes through
/// parts[0] first.
class BlockGraph {
public:
    enum class Op { Edge, Series, Parallel };

    static BlockGraph edge(std::string block) { return BlockGraph(Op::Edge, std::move(block), {}); }
    static BlockGraph series(std::vector<BlockGraph> parts) {
        if (parts.empty()) throw Error(Errc::MalformedGraph, "series connection needs at least one part");
        return BlockGraph(Op::Series, {}, std::move(parts));
    }
    static BlockGraph parallel(std::vector<BlockGraph> parts) {
        if (parts.empty()) throw Error(Errc::MalformedGraph, "parallel connection needs at least one part");
        return BlockGraph(Op::Parallel, {}, std::move(parts));
    }

    [[nodiscard]] Op op() const noexcept { return op_; }
    [[nodiscard]] const std::string& block() const noexcept { return block_; }
    [[nodiscard]] const std::vector<BlockGraph>& parts() const noexcept { return parts_; }

private:
    BlockGraph(Op op, std::string block, std::vector<BlockGraph> parts)
        : op_(op), block_(std::move(block)), parts_(std::move(parts)) {}

    Op op_;
    std::string block_;
    std::vector<BlockGraph> parts_;
};

/// Lowers a series-parallel graph to a composition expression. A series
/// chain B1 -> B2 becomes Mul(B2, B1): the downstream block multiplies on
/// the left, matching the one-step update x_out = A2 A1 x_in. Parallel
/// branches become nested sums folded left.
inline CompositionExpr compile_graph(const BlockGraph& g) {
    switch (g.op()) {
        case BlockGraph::Op::Edge:
            return CompositionExpr::ref(g.block());
        case BlockGraph::Op::Series: {
            CompositionExpr acc = compile_graph(g.parts().front());
            for (std::size_t i = 1; i < g.parts().size(); ++i) {
                acc = CompositionExpr::mul(compile_graph(g.parts()[i]), acc);
            }
            return acc;
        }
        case BlockGraph::Op::Parallel: {
            CompositionExpr acc = compile_graph(g.parts().front());
            for (std::size_t i = 1; i < g.parts().size(); ++i) {
                acc = CompositionExpr::add(acc, compile_graph(g.parts()[i]));
            }
            return acc;
        }
    }
    throw Error(Errc::MalformedGraph, "unknown graph node");
}

}  // namespace possys
