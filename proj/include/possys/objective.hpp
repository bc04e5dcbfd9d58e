#pragma once

// Coordinate-wise monotone objectives evaluated on non-negative states. The
// 1- and 2-norms and positively weighted sums are strictly increasing in
// every coordinate; the max-norm is monotone but not strictly, which matters
// for uniqueness claims about optimal trajectories.

#include "possys/errors.hpp"
#include "possys/matrix_set.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace possys {

class MonotoneObjective {
public:
    enum class Kind { L1, L2, Linf, WeightedSum };

    static MonotoneObjective l1() { return MonotoneObjective(Kind::L1, {}); }
    static MonotoneObjective l2() { return MonotoneObjective(Kind::L2, {}); }
    static MonotoneObjective linf() { return MonotoneObjective(Kind::Linf, {}); }
    static MonotoneObjective weighted_sum(Vec weights) {
        if (weights.size() == 0 || (weights.array() <= 0.0).any()) {
            throw Error(Errc::NonPositiveVector, "weighted-sum objective needs strictly positive weights");
        }
        return MonotoneObjective(Kind::WeightedSum, std::move(weights));
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const Vec& weights() const noexcept { return weights_; }

    /// Strictly increasing in every coordinate? False only for the max-norm.
    [[nodiscard]] bool strict() const noexcept { return kind_ != Kind::Linf; }

    [[nodiscard]] const char* name() const noexcept {
        switch (kind_) {
            case Kind::L1: return "l1";
            case Kind::L2: return "l2";
            case Kind::Linf: return "linf";
            case Kind::WeightedSum: return "weighted-sum";
        }
        return "?";
    }

private:
    MonotoneObjective(Kind kind, Vec weights) : kind_(kind), weights_(std::move(weights)) {}

    Kind kind_;
    Vec weights_;
};

inline double nu_eval(const MonotoneObjective& obj, const Vec& x) {
    if ((x.array() < 0.0).any()) {
        throw Error(Errc::NegativeInput, "objective arguments must be non-negative");
    }
    switch (obj.kind()) {
        case MonotoneObjective::Kind::L1: return x.sum();
        case MonotoneObjective::Kind::L2: return x.norm();
        case MonotoneObjective::Kind::Linf: return x.size() == 0 ? 0.0 : x.maxCoeff();
        case MonotoneObjective::Kind::WeightedSum:
            if (obj.weights().size() != x.size()) {
                throw DimMismatchError("weights", "x", "weight vector length must match the state dimension");
            }
            return obj.weights().dot(x);
    }
    return 0.0;
}

}  // namespace possys
