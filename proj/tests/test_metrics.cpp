#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "hemd/metrics.hpp"

using namespace hemd;

namespace {

Region make_region(std::initializer_list<std::int32_t> pixels) {
    return Region(std::vector<std::int32_t>(pixels));
}

Region range_region(int first, int last) {  // [first, last)
    std::vector<std::int32_t> pixels;
    for (int i = first; i < last; ++i) pixels.push_back(i);
    return Region(std::move(pixels));
}

}  // namespace

TEST_CASE("match_pairs") {
    SUBCASE("identical families pair up one to one") {
        const std::vector<Region> family{make_region({0, 1}),
                                         make_region({5, 6, 7})};
        const auto pairs = match_pairs(family, family);
        REQUIRE(pairs.size() == 2);
        CHECK(pairs[0] == std::pair<int, int>{0, 0});
        CHECK(pairs[1] == std::pair<int, int>{1, 1});
    }
    SUBCASE("disjoint families never match") {
        const std::vector<Region> gt{make_region({0, 1})};
        const std::vector<Region> pred{make_region({10, 11})};
        CHECK(match_pairs(gt, pred).empty());
    }
    SUBCASE("IoU 6/10 counts as a match") {
        const std::vector<Region> gt{range_region(0, 10)};
        const std::vector<Region> pred{range_region(0, 6)};
        REQUIRE(match_pairs(gt, pred).size() == 1);
    }
    SUBCASE("IoU just below 0.5 does not match") {
        const std::vector<Region> gt{range_region(0, 10)};
        const std::vector<Region> pred{range_region(0, 4)};
        CHECK(match_pairs(gt, pred).empty());
    }
    SUBCASE("overlapping inputs are rejected") {
        const std::vector<Region> gt{make_region({0, 1}), make_region({1, 2})};
        const std::vector<Region> pred{make_region({0})};
        CHECK_THROWS_AS(match_pairs(gt, pred), OverlapError);
        CHECK_THROWS_AS(match_pairs(pred, gt), OverlapError);
    }
}

TEST_CASE("f1 score") {
    const std::vector<Region> two{make_region({0, 1, 2}),
                                  make_region({10, 11, 12})};
    SUBCASE("perfect prediction") {
        CHECK(f1_score(two, two) == Fraction(1));
    }
    SUBCASE("zero overlap") {
        const std::vector<Region> far{make_region({20, 21}),
                                      make_region({30, 31})};
        CHECK(f1_score(two, far) == Fraction(0));
    }
    SUBCASE("one of two matched gives precision = recall = 1/2") {
        const std::vector<Region> pred{make_region({0, 1, 2}),
                                       make_region({40, 41, 42})};
        CHECK(f1_score(two, pred) == Fraction(1, 2));
    }
    SUBCASE("empty-family conventions") {
        const std::vector<Region> none;
        CHECK(f1_score(none, none) == Fraction(1));
        CHECK(f1_score(two, none) == Fraction(0));
        CHECK(f1_score(none, two) == Fraction(0));
    }
}

TEST_CASE("aji score") {
    SUBCASE("perfect prediction") {
        const std::vector<Region> family{make_region({0, 1}),
                                         make_region({4, 5, 6})};
        CHECK(aji_score(family, family) == Fraction(1));
    }
    SUBCASE("partial overlap 2/3") {
        const std::vector<Region> gt{make_region({0, 1, 2})};
        const std::vector<Region> pred{make_region({0, 1})};
        CHECK(aji_score(gt, pred) == Fraction(2, 3));
    }
    SUBCASE("fully disjoint prediction scores zero") {
        const std::vector<Region> gt{make_region({0, 1, 2})};
        const std::vector<Region> pred{make_region({10, 11})};
        CHECK(aji_score(gt, pred) == Fraction(0));
    }
    SUBCASE("unused prediction penalizes the denominator") {
        const std::vector<Region> gt{range_region(0, 4)};
        const std::vector<Region> pred{range_region(0, 3),
                                       make_region({10, 11})};
        // 3 / (4 + 2) with the stray prediction in the penalty set.
        CHECK(aji_score(gt, pred) == Fraction(1, 2));
    }
    SUBCASE("argmax ties break to the lowest prediction index") {
        const std::vector<Region> gt{make_region({0, 1})};
        const std::vector<Region> pred{make_region({0}), make_region({1})};
        // Chooses pred 0: 1 / (2 + 1 penalty) = 1/3.
        CHECK(aji_score(gt, pred) == Fraction(1, 3));
    }
    SUBCASE("a prediction may be argmax for several ground truths") {
        const std::vector<Region> gt{make_region({0, 1}), make_region({2, 3})};
        const std::vector<Region> pred{range_region(0, 4)};
        CHECK(aji_score(gt, pred) == Fraction(1, 2));
    }
    SUBCASE("unmatched ground truth adds only to the denominator") {
        const std::vector<Region> gt{make_region({0, 1}),
                                     make_region({10, 11})};
        const std::vector<Region> pred{make_region({0, 1})};
        // 2 / (2 + 2).
        CHECK(aji_score(gt, pred) == Fraction(1, 2));
    }
}

TEST_CASE("metrics are invariant under instance order") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        // Build tie-free random families from fixed-size strided blocks.
        std::vector<Region> gt, pred;
        int cursor = 0;
        std::uniform_int_distribution<int> count(1, 4);
        std::uniform_int_distribution<int> size(2, 6);
        std::uniform_int_distribution<int> shift(0, 2);
        const int instances = count(rng);
        for (int k = 0; k < instances; ++k) {
            const int n = size(rng);
            gt.push_back(range_region(cursor, cursor + n));
            const int offset = shift(rng);
            pred.push_back(range_region(cursor + offset, cursor + n + offset));
            cursor += n + 10;
        }
        const Fraction f1_base = f1_score(gt, pred);
        const Fraction aji_base = aji_score(gt, pred);

        std::vector<std::size_t> order(pred.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<Region> shuffled;
        for (std::size_t idx : order) shuffled.push_back(pred[idx]);

        CHECK(f1_score(gt, shuffled) == f1_base);
        CHECK(aji_score(gt, shuffled) == aji_base);
        CHECK(aji_base >= 0);
        CHECK(aji_base <= 1);
        CHECK((aji_base == 1) == (gt == pred));
    }
}
