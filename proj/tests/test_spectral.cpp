#include "possys/spectral.hpp"

#include "possys/algebra.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace possys;
using namespace possys::testing;

TEST_SUITE_BEGIN("spectral");

TEST_CASE("symmetric two-by-two radius") {
    const SpectralResult r = spectral_radius(mat({{2, 1}, {1, 2}}));
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("counterexample factors have radius four") {
    for (const Mat& m : incomparable_pair(2.0)) {
        CHECK(spectral_radius(m).value == doctest::Approx(4.0).epsilon(1e-10));
    }
}

TEST_CASE("counterexample product has radius twenty-five") {
    CHECK(spectral_radius(mat({{20, 10}, {10, 5}})).value == doctest::Approx(25.0).epsilon(1e-10));
}

TEST_CASE("rejects non-square, non-finite and negative input") {
    CHECK_THROWS_AS(spectral_radius(mat({{1, 2}})), Error);
    Mat bad = mat({{1, 1}, {1, 1}});
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(spectral_radius(bad), Error);
    CHECK_THROWS_AS(spectral_radius(mat({{1, -1}, {1, 1}})), Error);
    CHECK_NOTHROW(spectral_radius_dense(mat({{1, -1}, {1, 1}})));
}

TEST_CASE("power kernel agrees with the dense eigensolver on random matrices") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        const Index n = 1 + static_cast<Index>(rng() % 8);
        Mat m(n, n);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                m(i, j) = (rng() % 5 == 0) ? 0.0 : in_range(rng, 0.0, 3.0);
            }
        }
        const double via_power = spectral_radius(m).value;
        const double via_dense = spectral_radius_dense(m).value;
        CHECK(std::abs(via_power - via_dense) <= 1e-9 * std::max(1.0, via_dense));
    }
}

TEST_CASE("radius is positively homogeneous") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 20; ++trial) {
        Mat m(3, 3);
        for (Index i = 0; i < 3; ++i) {
            for (Index j = 0; j < 3; ++j) m(i, j) = in_range(rng, 0.0, 2.0);
        }
        const double t = in_range(rng, 0.1, 5.0);
        const double lhs = spectral_radius(Mat(t * m)).value;
        const double rhs = t * spectral_radius(m).value;
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("radius of a power is the power of the radius") {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 20; ++trial) {
        Mat m(3, 3);
        for (Index i = 0; i < 3; ++i) {
            for (Index j = 0; j < 3; ++j) m(i, j) = in_range(rng, 0.1, 1.5);
        }
        const double rho = spectral_radius(m).value;
        Mat power = m;
        for (int k = 2; k <= 5; ++k) {
            power = power * m;
            const double lhs = spectral_radius(power).value;
            const double rhs = std::pow(rho, k);
            CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, rhs));
        }
    }
}

TEST_CASE("extrema of the counterexample set coincide at four") {
    const MatrixSet set = make_explicit(incomparable_pair(2.0), Mode::Positive);
    const RhoExtrema e = rho_extrema(set);
    CHECK(e.rho_max == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(e.rho_min == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(e.max_witness == 0);  // tie resolved to the smallest index
    CHECK(e.min_witness == 0);
}

TEST_CASE("extrema of a scalar pair") {
    const MatrixSet set = make_explicit({mat({{0.5}}), mat({{2.0}})}, Mode::Positive);
    const RhoExtrema e = rho_extrema(set);
    CHECK(e.rho_min == doctest::Approx(0.5));
    CHECK(e.rho_max == doctest::Approx(2.0));
    CHECK(e.min_witness == 0);
    CHECK(e.max_witness == 1);
}

TEST_CASE("extrema match per-member radii on random IRU sets") {
    std::mt19937_64 rng(109);
    const MatrixSet set = random_iru(rng, {2, 2, 2}, 3);
    const RhoExtrema e = rho_extrema(set);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Mat& m : enumerate(set)) {
        const double rho = spectral_radius(m).value;
        lo = std::min(lo, rho);
        hi = std::max(hi, rho);
    }
    CHECK(e.rho_min == doctest::Approx(lo).epsilon(1e-12));
    CHECK(e.rho_max == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("ordered chain witnesses are the chain endpoints") {
    std::mt19937_64 rng(113);
    for (int trial = 0; trial < 10; ++trial) {
        const MatrixSet chain = random_ordered(rng, 3, 3);
        const RhoExtrema e = rho_extrema(chain);
        CHECK(e.min_witness == 0);
        CHECK(e.max_witness == chain.cardinality().value - 1);
    }
}

TEST_CASE("greedy row selection on a singleton settles immediately") {
    const MatrixSet set = make_iru({{row({1, 2})}, {row({3, 4})}}, Mode::Positive);
    const IruGreedyResult g = iru_greedy_extremum(set, Direction::Max);
    CHECK(g.rounds <= 2);
    CHECK(g.value == doctest::Approx(spectral_radius(set.member_at(0)).value));
}

TEST_CASE("greedy row selection matches enumeration on random sets") {
    std::mt19937_64 rng(127);
    for (int trial = 0; trial < 10; ++trial) {
        const MatrixSet set = random_iru(rng, {3, 3, 3}, 3);
        const RhoExtrema e = rho_extrema(set);
        CHECK(std::abs(iru_greedy_extremum(set, Direction::Max).value - e.rho_max) <= 1e-9);
        CHECK(std::abs(iru_greedy_extremum(set, Direction::Min).value - e.rho_min) <= 1e-9);
    }
}

TEST_CASE("greedy row selection on the lifted running example") {
    const MatrixSet set = make_iru({{row({1, 2}), row({2, 1})}, {row({1, 1}), row({3, 0.1})}}, Mode::Positive);
    const RhoExtrema e = rho_extrema(set);
    CHECK(std::abs(iru_greedy_extremum(set, Direction::Max).value - e.rho_max) <= 1e-9);
    CHECK(std::abs(iru_greedy_extremum(set, Direction::Min).value - e.rho_min) <= 1e-9);
}

TEST_CASE("greedy agrees with enumeration across many small instances") {
    std::mt19937_64 rng(131);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 2 + static_cast<Index>(rng() % 3);  // N <= 4
        std::vector<std::size_t> sizes;
        for (Index i = 0; i < n; ++i) sizes.push_back(1 + rng() % 4);
        const MatrixSet set = random_iru(rng, sizes, n);
        const RhoExtrema e = rho_extrema(set);
        const Direction dir = (rng() % 2 == 0) ? Direction::Max : Direction::Min;
        const double expected = dir == Direction::Max ? e.rho_max : e.rho_min;
        CHECK(std::abs(iru_greedy_extremum(set, dir).value - expected) <= 1e-9);
    }
}

TEST_CASE("depth-two bounds expose the counterexample gap") {
    const MatrixSet set = make_explicit(incomparable_pair(2.0), Mode::Positive);
    const BoundReport b = product_bounds(set, 2);
    CHECK(b.jsr_lower >= 5.0 - 1e-9);     // rho(A1 A2)^(1/2) = 5
    CHECK(b.jsr_lower > rho_extrema(set).rho_max);
    CHECK(b.jsr_lower <= b.jsr_upper);
    CHECK(b.lsr_upper <= 4.0 + 1e-9);     // rho(A1^2)^(1/2) = 4
}

TEST_CASE("singleton bounds collapse to the radius") {
    const MatrixSet set = make_explicit({mat({{2, 1}, {1, 2}})}, Mode::Positive);
    for (int depth : {1, 2, 3, 4}) {
        const BoundReport b = product_bounds(set, depth);
        CHECK(b.jsr_lower == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(b.lsr_upper == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(b.jsr_upper >= b.jsr_lower);
    }
}

TEST_CASE("bounds behave like the family theory predicts on random IRU sets") {
    std::mt19937_64 rng(137);
    const MatrixSet set = random_iru(rng, {2, 2}, 2);
    const RhoExtrema e = rho_extrema(set);
    double previous = 0.0;
    for (int depth = 1; depth <= 6; ++depth) {
        const BoundReport b = product_bounds(set, depth);
        CHECK(b.jsr_lower <= e.rho_max + 1e-8);
        CHECK(b.lsr_upper >= e.rho_min - 1e-8);
        CHECK(b.jsr_lower >= previous - 1e-10);  // non-decreasing toward rho_max
        previous = b.jsr_lower;
    }
}

TEST_CASE("every norm choice gives valid upper bounds") {
    std::mt19937_64 rng(139);
    const MatrixSet set = random_iru(rng, {2, 2}, 2);
    for (NormKind norm : {NormKind::One, NormKind::Inf, NormKind::Frobenius}) {
        const BoundReport b = product_bounds(set, 3, norm);
        CHECK(b.jsr_lower <= b.jsr_upper);
        CHECK(b.norm == norm);
    }
}

TEST_CASE("budget guard rejects oversized enumerations") {
    std::mt19937_64 rng(149);
    const MatrixSet set = random_iru(rng, {3, 3}, 2);  // 9 members
    CHECK_THROWS_AS(product_bounds(set, 9, NormKind::Inf, 1000), BudgetExceededError);
}

TEST_CASE("analysis of a scaled IRU set reports stability") {
    std::mt19937_64 rng(151);
    const MatrixSet raw = random_iru(rng, {2, 2}, 2);
    const double rho_max = rho_extrema(raw).rho_max;
    const MatrixSet set = scale(0.9 / rho_max, raw);
    const AnalysisReport report = analyze(set);
    CHECK(report.rho_max == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(report.stable);
    CHECK(report.hset_status == HsetStatus::VerifiedFamily);
    CHECK(report.basis == VerdictBasis::Certified);
}

TEST_CASE("analysis of the counterexample set downgrades to extrema-only") {
    const MatrixSet set = make_explicit(incomparable_pair(2.0), Mode::Positive);
    AnalyzeOptions opts;
    opts.oracle_depth = 2;
    opts.hourglass_forced_samples = {vec({1, 1})};
    const AnalysisReport report = analyze(set, opts);
    CHECK(report.rho_max == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(report.hset_status == HsetStatus::Falsified);
    CHECK(report.basis == VerdictBasis::ExtremaOnly);
    REQUIRE(report.hset_witness.has_value());
    CHECK(report.hset_witness->x == vec({1, 1}));
    REQUIRE(report.oracle_bounds.has_value());
    CHECK(report.oracle_bounds->jsr_lower >= 5.0 - 1e-9);
    CHECK(report.oracle_bounds->jsr_lower > report.rho_max);
}

TEST_CASE("analysis of a scalar pair") {
    const MatrixSet set = make_explicit({mat({{0.5}}), mat({{2.0}})}, Mode::Positive);
    const AnalysisReport report = analyze(set);
    CHECK_FALSE(report.stable);
    CHECK(report.stabilizable);
    CHECK(report.rho_max == doctest::Approx(2.0));
    CHECK(report.rho_min == doctest::Approx(0.5));
}

TEST_CASE("greedy cross-check is attached and validated for positive IRU sets") {
    std::mt19937_64 rng(157);
    const MatrixSet set = random_iru(rng, {2, 2, 2}, 3);
    AnalyzeOptions opts;
    opts.use_greedy = true;
    const AnalysisReport report = analyze(set, opts);
    REQUIRE(report.greedy.has_value());
    CHECK(report.greedy->validated);
    CHECK(report.greedy->value_max == doctest::Approx(report.rho_max).epsilon(1e-9));
    CHECK(report.greedy->value_min == doctest::Approx(report.rho_min).epsilon(1e-9));
}

TEST_SUITE_END();
