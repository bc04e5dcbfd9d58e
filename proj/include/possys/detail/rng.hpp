#pragma once

// Seeded sampling helpers. The mapping from raw 64-bit draws to doubles is
// spelled out here instead of using std::uniform_real_distribution, whose
// output is not pinned by the standard; reports must reproduce bit-for-bit
// across toolchains.

#include "possys/matrix_set.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace possys::detail {

/// Uniform in [0, 1) with 53 random mantissa bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

/// Coordinates 10^u with u uniform in [-2, 2]: exercises both small and
/// large coordinate ratios, which is where dominance checks are fragile.
inline Vec log_uniform_vector(std::mt19937_64& rng, Index n) {
    Vec x(n);
    for (Index i = 0; i < n; ++i) x(i) = std::pow(10.0, uniform_in(rng, -2.0, 2.0));
    return x;
}

}  // namespace possys::detail
