#include "possys/matrix_set.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace possys;
using namespace possys::testing;

TEST_SUITE_BEGIN("matset");

TEST_CASE("explicit set accepts the incomparable pair") {
    const MatrixSet set = make_explicit(incomparable_pair(2.0), Mode::Positive);
    CHECK(set.kind() == SetKind::Explicit);
    CHECK(set.cardinality().value == 2);
    CHECK(set.rows() == 2);
    CHECK(set.cols() == 2);
    CHECK_FALSE(set.hset_by_construction());
}

TEST_CASE("explicit singleton 1x1") {
    const MatrixSet set = make_explicit({mat({{1.0}})}, Mode::Positive);
    CHECK(set.cardinality().value == 1);
    CHECK(set.member_at(0)(0, 0) == 1.0);
}

TEST_CASE("zero entry is rejected in positive mode with its location") {
    try {
        make_explicit({mat({{1.0, 0.0}, {0.0, 1.0}})}, Mode::Positive);
        FAIL("expected ModeViolation");
    } catch (const ModeViolationError& e) {
        CHECK(e.member == 0);
        CHECK(e.row == 0);
        CHECK(e.col == 1);
    }
}

TEST_CASE("non-finite entries are rejected in any mode") {
    Mat bad = mat({{1.0, 2.0}, {3.0, 4.0}});
    bad(1, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_WITH_AS(make_explicit({bad}, Mode::NonNegative), doctest::Contains("not finite"), Error);
}

TEST_CASE("empty inputs are rejected") {
    CHECK_THROWS_AS(make_explicit({}, Mode::Positive), Error);
    CHECK_THROWS_AS(make_iru({}, Mode::Positive), Error);
    CHECK_THROWS_AS(make_ordered({}, Mode::Positive), Error);
    CHECK_THROWS_AS(make_iru({{row({1.0, 2.0})}, {}}, Mode::Positive), Error);
}

TEST_CASE("mismatched dimensions are rejected") {
    CHECK_THROWS_AS(make_explicit({mat({{1.0}}), mat({{1.0, 2.0}})}, Mode::Positive), DimMismatchError);
    CHECK_THROWS_AS(make_iru({{row({1.0, 2.0})}, {row({1.0})}}, Mode::Positive), Error);
}

TEST_CASE("two-by-three row sets enumerate six members in row-choice order") {
    // rows {(1,2),(3,4)} and {(5,6),(7,8),(9,10)}
    const MatrixSet set = make_iru({{row({1, 2}), row({3, 4})}, {row({5, 6}), row({7, 8}), row({9, 10})}},
                                   Mode::Positive);
    CHECK(set.cardinality().value == 6);
    CHECK(set.hset_by_construction());
    const std::vector<Mat> members = enumerate(set);
    REQUIRE(members.size() == 6);
    CHECK(members[0] == mat({{1, 2}, {5, 6}}));
    CHECK(members[1] == mat({{1, 2}, {7, 8}}));
    CHECK(members[2] == mat({{1, 2}, {9, 10}}));
    CHECK(members[3] == mat({{3, 4}, {5, 6}}));
    CHECK(members[4] == mat({{3, 4}, {7, 8}}));
    CHECK(members[5] == mat({{3, 4}, {9, 10}}));
}

TEST_CASE("single row per set gives a singleton IRU set") {
    const MatrixSet set = make_iru({{row({1, 2})}, {row({3, 4})}}, Mode::Positive);
    CHECK(set.cardinality().value == 1);
    CHECK(enumerate(set)[0] == mat({{1, 2}, {3, 4}}));
}

TEST_CASE("running 2x2 IRU example validates in non-negative mode") {
    const MatrixSet set = make_iru({{row({1, 2}), row({2, 1})}, {row({1, 1}), row({3, 0})}}, Mode::NonNegative);
    CHECK(set.cardinality().value == 4);
    CHECK(set.mode() == Mode::NonNegative);
    CHECK_THROWS_AS(make_iru({{row({1, 2}), row({2, 1})}, {row({1, 1}), row({3, 0})}}, Mode::Positive),
                    ModeViolationError);
}

TEST_CASE("ordered chain accepts strict element-wise growth") {
    const MatrixSet set = make_ordered({mat({{1, 1}, {1, 1}}), mat({{2, 3}, {2, 2}})}, Mode::Positive);
    CHECK(set.kind() == SetKind::Ordered);
    CHECK(set.hset_by_construction());
    CHECK(set.cardinality().value == 2);
}

TEST_CASE("ordered chain reports the first offending pair and entry") {
    try {
        make_ordered({mat({{1, 1}, {1, 1}}), mat({{2, 0.5}, {2, 2}})}, Mode::Positive);
        FAIL("expected ChainViolation");
    } catch (const ChainViolationError& e) {
        CHECK(e.pair_first == 1);
        CHECK(e.row == 0);
        CHECK(e.col == 1);
    }
}

TEST_CASE("non-negative chains allow equality") {
    const Mat swap = mat({{0, 1}, {1, 0}});
    const MatrixSet set = make_ordered({swap, swap}, Mode::NonNegative);
    CHECK(set.cardinality().value == 2);
    CHECK_THROWS_AS(make_ordered({swap, swap}, Mode::Positive), Error);
}

TEST_CASE("enumeration limit triggers cardinality overflow") {
    std::vector<std::vector<RowVec>> rows(3);
    for (auto& rs : rows) rs = {row({1, 1, 1}), row({2, 2, 2}), row({3, 3, 3})};
    const MatrixSet set = make_iru(std::move(rows), Mode::Positive);
    CHECK(set.cardinality().value == 27);
    CHECK_THROWS_AS(enumerate(set, 20), CardinalityOverflowError);
    CHECK(enumerate(set, 27).size() == 27);
}

TEST_CASE("IRU enumeration count and verbatim rows") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> sizes = {1 + rng() % 3, 1 + rng() % 3, 1 + rng() % 3};
        const MatrixSet set = random_iru(rng, sizes, 3);
        std::uint64_t expected = 1;
        for (std::size_t s : sizes) expected *= s;
        const std::vector<Mat> members = enumerate(set);
        CHECK(members.size() == expected);
        // every row of every member is one of the options, bit for bit
        for (std::size_t k = 0; k < members.size(); ++k) {
            const auto choices = set.iru_choices(k);
            CHECK(set.iru_flat(choices) == k);
            for (std::size_t i = 0; i < sizes.size(); ++i) {
                CHECK(members[k].row(static_cast<Index>(i)) == set.row_sets()[i][choices[i]]);
            }
        }
    }
}

TEST_CASE("chains built by cumulative positive increments always validate") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t length = 2 + rng() % 4;
        const MatrixSet set = random_ordered(rng, length, 3);
        CHECK(set.cardinality().value == length);
    }
}

TEST_CASE("mode validation is total over random planted violations") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        Mat m(2, 2);
        for (Index i = 0; i < 2; ++i) {
            for (Index j = 0; j < 2; ++j) m(i, j) = in_range(rng, 0.1, 2.0);
        }
        const Index r = static_cast<Index>(rng() % 2);
        const Index c = static_cast<Index>(rng() % 2);
        m(r, c) = -in_range(rng, 0.0, 1.0) - 0.001;
        CHECK_THROWS_AS(make_explicit({m}, Mode::NonNegative), ModeViolationError);
        CHECK_THROWS_AS(make_explicit({m}, Mode::Positive), ModeViolationError);
    }
}

TEST_SUITE_END();
