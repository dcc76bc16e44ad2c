#include <catch_amalgamated.hpp>

#include "combnet/combinatorics.hpp"

using namespace combnet;

TEST_CASE("binomial basics") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(15, 7) == 6435);
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(5, 6) == 0);
  CHECK(binomial(20, 10) == 184756);
  CHECK_THROWS_AS(binomial(-1, 0), parameter_error);
}

TEST_CASE("subset rank and unrank") {
  CHECK(unrank_subset(0, 4, 2) == Subset{1, 2});
  CHECK(rank_subset({3, 4}, 4) == 5);  // last pair in lex order
  CHECK(unrank_subset(5, 4, 2) == Subset{3, 4});
  CHECK(unrank_subset(0, 5, 0) == Subset{});
  CHECK(rank_subset({}, 5) == 0);

  SECTION("mutually inverse on all k-subsets, n <= 8") {
    for (int n = 1; n <= 8; ++n)
      for (int k = 0; k <= n; ++k)
        for (std::uint64_t i = 0; i < binomial(n, k); ++i)
          CHECK(rank_subset(unrank_subset(i, n, k), n) == i);
  }

  SECTION("enumeration order matches rank") {
    std::uint64_t expect = 0;
    for_each_subset(6, 3, [&](const Subset& s) { CHECK(rank_subset(s, 6) == expect++); });
    CHECK(expect == 20);
  }

  CHECK_THROWS_AS(unrank_subset(6, 4, 2), parameter_error);
  CHECK_THROWS_AS(rank_subset({2, 1}, 4), parameter_error);
  CHECK_THROWS_AS(rank_subset({1, 5}, 4), parameter_error);
}

TEST_CASE("masks and lexicographic comparison") {
  CHECK(mask_of({1, 3}) == 0b101);
  CHECK(subset_of_mask(0b1101) == Subset{1, 3, 4});
  CHECK(lex_less_masks(mask_of({1, 4}), mask_of({2, 3})));
  CHECK_FALSE(lex_less_masks(mask_of({2, 3}), mask_of({1, 4})));
  CHECK(lex_less_masks(mask_of({1, 2}), mask_of({1, 2, 3})));  // prefix first
  CHECK_FALSE(lex_less_masks(mask_of({1, 2}), mask_of({1, 2})));

  // mask order agrees with subset rank order for equal sizes
  std::vector<std::uint64_t> masks;
  for_each_subset(6, 3, [&](const Subset& s) { masks.push_back(mask_of(s)); });
  CHECK(std::is_sorted(masks.begin(), masks.end(),
                       [](std::uint64_t a, std::uint64_t b) { return lex_less_masks(a, b); }));
}

TEST_CASE("lcm helper") {
  CHECK(lcm_upto(1) == 1);
  CHECK(lcm_upto(4) == 12);
  CHECK(lcm_upto(6) == 60);
}

TEST_CASE("subset printing") {
  CHECK(subset_string({1, 2, 4}) == "{1,2,4}");
  CHECK(subset_string({}) == "{}");
}
