#include <vector>

#include "doctest.h"
#include "fctl/lattice.hpp"
#include "oracles.hpp"

using namespace fctl;

TEST_CASE("indicator T detects a visit to zero") {
  CHECK(indicator_T(0, std::vector<int>{}) == 1);
  CHECK(indicator_T(1, std::vector<int>{1, 1}) == 0);
  CHECK(indicator_T(1, std::vector<int>{0}) == 1);
  CHECK(indicator_T(2, std::vector<int>{0, 1, 0, 0}) == 1);
  CHECK(indicator_T(2, std::vector<int>{0, 1, 1}) == 0);
  CHECK(indicator_T(2, std::vector<int>{0, 1, 0}) == 1);
}

TEST_CASE("G sets match exhaustive search") {
  for (int g = 1; g <= 6; ++g) {
    const GTable t = enumerate_G(g);
    for (int j = 0; j < g; ++j)
      for (int l = 0; l <= j; ++l) {
        CAPTURE(g);
        CAPTURE(j);
        CAPTURE(l);
        CHECK(t.sets(j, l) == oracle::brute_force_G(j, l));
      }
  }
}

TEST_CASE("G set properties") {
  const GTable t = enumerate_G(5);
  CHECK(t.sets(0, 0).size() == 1);
  for (int j = 1; j < 5; ++j) {
    CHECK(t.sets(j, 0).empty());
    for (int l = 1; l <= j; ++l)
      for (const auto& v : t.sets(j, l)) {
        CHECK(static_cast<int>(v.size()) == j);
        CHECK(v.back() == 0);
        int sum = 0;
        for (int x : v) sum += x;
        CHECK(sum == j - l);
      }
  }
  // With l = j the queue drains one vehicle per slot with no arrivals.
  CHECK(t.sets(3, 3) == std::vector<std::vector<int>>{{0, 0, 0}});
  CHECK_THROWS(enumerate_G(0));
}

TEST_CASE("G set sizes are ballot numbers") {
  // |G(j, l)| = l/j * C(2j-l-1, j-1) for j >= 1.
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  const GTable t = enumerate_G(9);
  for (int j = 1; j < 9; ++j)
    for (int l = 1; l <= j; ++l)
      CHECK(static_cast<double>(t.sets(j, l).size()) ==
            doctest::Approx(static_cast<double>(l) / j * binom(2 * j - l - 1, j - 1)));
}
