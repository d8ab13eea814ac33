#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "compols/ski.hpp"

#include <algorithm>

using namespace compols;

namespace {

// Worst empirical ratio of the rent-b-days-then-buy policy over all horizons.
double brute_force_worst_ratio(int p, int b, int max_x) {
  double worst = 0.0;
  for (int x = 1; x <= max_x; ++x) {
    auto [alg, opt] = ski_cost({p, b}, x);
    worst = std::max(worst, alg / opt);
  }
  return worst;
}

}  // namespace

TEST_CASE("ski_cost follows the rent-then-buy rule") {
  CHECK(ski_cost({10, 10}, 5) == std::pair(5.0, 5.0));
  CHECK(ski_cost({10, 10}, 100) == std::pair(20.0, 10.0));
  CHECK(ski_cost({10, 5}, 6) == std::pair(15.0, 6.0));
  CHECK_THROWS_AS(ski_cost({10, 10}, 0), std::invalid_argument);
}

TEST_CASE("ski_df closed form") {
  for (int p : {2, 7, 10, 40}) CHECK(ski_df(p, p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ski_df(12, 36) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ski_df(10, 5) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("ski_phi_class intervals") {
  auto at = ski_phi_class(10, 1.0);
  CHECK(at.lo == 10);
  CHECK(at.hi == 10);

  auto two = ski_phi_class(12, 2.0);
  CHECK(two.lo == 4);
  CHECK(two.hi == 36);

  auto mid = ski_phi_class(10, 1.5);
  CHECK(mid.lo == 5);
  CHECK(mid.hi == 20);

  CHECK_THROWS_AS(ski_phi_class(10, 0.5), std::invalid_argument);
}

TEST_CASE("brute force never exceeds 2*DF and matches it for b >= p") {
  for (int p : {3, 10, 17}) {
    for (int b = 1; b <= 3 * p; ++b) {
      const double worst = brute_force_worst_ratio(p, b, 10 * p);
      const double bound = 2.0 * ski_df(p, b);
      CHECK(worst <= bound + 1e-12);
      if (b >= p) CHECK(worst == doctest::Approx(bound).epsilon(1e-12));
    }
  }
}

TEST_CASE("phi-class membership is sound and tight") {
  for (int p : {5, 12, 30})
    for (double phi : {1.0, 1.25, 2.0, 3.5}) {
      auto interval = ski_phi_class(p, phi);
      REQUIRE(interval.lo <= interval.hi);
      for (int b = interval.lo; b <= interval.hi; ++b)
        CHECK(ski_df(p, b) <= phi + 1e-12);
      if (interval.lo > 1) CHECK(ski_df(p, interval.lo - 1) > phi);
      CHECK(ski_df(p, interval.hi + 1) > phi);
    }
}

TEST_CASE("DF is minimized at b = p") {
  for (int p : {2, 9, 25}) {
    int argmin = 1;
    for (int b = 1; b <= 5 * p; ++b)
      if (ski_df(p, b) < ski_df(p, argmin)) argmin = b;
    CHECK(argmin == p);
  }
}
