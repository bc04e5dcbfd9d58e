#pragma once

// Shared helpers for the test suites: terse matrix/vector literals and
// seeded random set generators kept independent of the library's samplers.

#include "possys/matrix_set.hpp"

#include <initializer_list>
#include <random>
#include <vector>

namespace possys::testing {

inline Mat mat(std::initializer_list<std::initializer_list<double>> rows) {
    Mat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& row : rows) {
        Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline Vec vec(std::initializer_list<double> values) {
    Vec v(static_cast<Index>(values.size()));
    Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

inline RowVec row(std::initializer_list<double> values) {
    RowVec r(static_cast<Index>(values.size()));
    Index i = 0;
    for (double x : values) r(i++) = x;
    return r;
}

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double in_range(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

/// The matrices of the 2x2 counterexample family with parameter a: two
/// positive matrices whose pairwise product has a strictly larger root than
/// either factor, so the pair is not an H-set.
inline std::vector<Mat> incomparable_pair(double a = 2.0) {
    return {mat({{a, a * a}, {1.0, a}}), mat({{a, 1.0}, {a * a, a}})};
}

/// Random positive IRU set with the given row-set sizes, entries uniform in
/// [lo, hi].
inline MatrixSet random_iru(std::mt19937_64& rng, const std::vector<std::size_t>& sizes, Index cols,
                            double lo = 0.2, double hi = 2.0) {
    std::vector<std::vector<RowVec>> row_sets(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        for (std::size_t j = 0; j < sizes[i]; ++j) {
            RowVec r(cols);
            for (Index c = 0; c < cols; ++c) r(c) = in_range(rng, lo, hi);
            row_sets[i].push_back(r);
        }
    }
    return make_iru(std::move(row_sets), Mode::Positive);
}

/// Random positive ordered chain built by cumulative positive increments.
inline MatrixSet random_ordered(std::mt19937_64& rng, std::size_t length, Index dim,
                                double lo = 0.2, double hi = 1.0) {
    std::vector<Mat> chain;
    Mat current(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) current(i, j) = in_range(rng, lo, hi);
    }
    chain.push_back(current);
    for (std::size_t k = 1; k < length; ++k) {
        Mat bump(dim, dim);
        for (Index i = 0; i < dim; ++i) {
            for (Index j = 0; j < dim; ++j) bump(i, j) = in_range(rng, 0.05, 0.5);
        }
        current += bump;
        chain.push_back(current);
    }
    return make_ordered(std::move(chain), Mode::Positive);
}

inline Vec random_positive_vec(std::mt19937_64& rng, Index n, double lo = 0.5, double hi = 2.0) {
    Vec x(n);
    for (Index i = 0; i < n; ++i) x(i) = in_range(rng, lo, hi);
    return x;
}

}  // namespace possys::testing
