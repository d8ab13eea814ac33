#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "compols/otp.hpp"

#include <cmath>

using namespace compols;

namespace {

const DensityBounds kGamma20(1.0, 20.0);
const DensityBounds kGammaE(1.0, std::exp(1.0));

RateInstance random_increasing_instance(Rng& rng, const DensityBounds& bounds,
                                        int max_len = 8) {
  RateInstance inst;
  inst.bounds = bounds;
  const int len = 1 + static_cast<int>(rng.uniform_index(max_len));
  double lo = bounds.L;
  for (int i = 0; i < len; ++i) {
    const double v = rng.uniform(lo, bounds.U);
    if (v <= lo + 1e-9) continue;
    inst.rates.push_back(v);
    lo = v;
  }
  if (inst.rates.empty()) inst.rates.push_back(bounds.U);
  return inst;
}

}  // namespace

TEST_CASE("inverse_threshold closed form") {
  ThresholdCurve c1(kGamma20, 1.0);
  CHECK(inverse_threshold(c1, kGamma20.L) == doctest::Approx(kGamma20.T()).epsilon(1e-15));
  CHECK(inverse_threshold(c1, kGamma20.U) == doctest::Approx(1.0).epsilon(1e-12));

  ThresholdCurve c2(kGamma20, 2.0);
  const double expected = kGamma20.T() * (1.0 + std::log(20.0) / 2.0);
  CHECK(inverse_threshold(c2, kGamma20.U) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.625).epsilon(2e-2));

  CHECK_THROWS_AS(inverse_threshold(c1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(inverse_threshold(c1, 21.0), std::invalid_argument);
}

TEST_CASE("psi and its inverse compose to the identity") {
  for (double alpha : {0.5, 1.0, 3.0}) {
    ThresholdCurve curve(kGamma20, alpha);
    for (double v = kGamma20.L; v <= kGamma20.U; v += 0.25) {
      const double z = inverse_threshold(curve, v);
      if (z < 1.0) CHECK(psi(curve, z) == doctest::Approx(v).epsilon(1e-12));
    }
  }
}

TEST_CASE("otp_step sells up to the inverse threshold") {
  ThresholdCurve curve(kGammaE, 1.0);  // T = 1/2
  auto [x1, z1] = otp_step(curve, 0.0, kGammaE.L);
  CHECK(x1 == doctest::Approx(kGammaE.T()).epsilon(1e-15));
  CHECK(z1 == x1);

  auto [x2, z2] = otp_step(curve, 1.0, kGammaE.U);
  CHECK(x2 == 0.0);
  CHECK(z2 == 1.0);

  // Rate chosen so Phi(rate) = 0.75 while z = 0.5 -> sell 0.25.
  const double rate = kGammaE.L * std::exp(1.0 * (0.75 / kGammaE.T() - 1.0) *
                                           (kGammaE.T() / kGammaE.T()));
  const double rate_for_075 = psi(curve, 0.75);
  auto [x3, z3] = otp_step(curve, 0.5, rate_for_075);
  CHECK(x3 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(z3 == doctest::Approx(0.75).epsilon(1e-12));
  (void)rate;
}

TEST_CASE("single-rate instance rewards v_1 on the first segment") {
  RateInstance inst;
  inst.bounds = kGamma20;
  inst.rates = {5.0};
  const double beta1 = std::log(5.0) / std::log(20.0);
  for (double alpha : {beta1 * 0.3, beta1 * 0.9, beta1}) {
    CHECK(otp_reward_closed_form(inst, alpha) == doctest::Approx(5.0).epsilon(1e-12));
  }
}

TEST_CASE("closed form equals simulation on random instances") {
  Rng rng = seeded_rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = random_increasing_instance(rng, kGamma20);
    for (int j = 0; j < 25; ++j) {
      const double alpha = std::exp(rng.uniform(std::log(0.05), std::log(40.0)));
      const double cf = otp_reward_closed_form(inst, alpha);
      const double sim = otp_simulate(inst, alpha);
      CHECK(cf == doctest::Approx(sim).epsilon(1e-10));
      (void)cf;
    }
  }
}

TEST_CASE("reward segments partition (0,inf) and agree at breakpoints") {
  Rng rng = seeded_rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = random_increasing_instance(rng, kGamma20);
    auto segs = otp_reward_segments(inst);
    REQUIRE_FALSE(segs.segments.empty());
    CHECK(segs.segments.front().alpha_lo == 0.0);
    CHECK(std::isinf(segs.segments.back().alpha_hi));
    for (std::size_t i = 1; i < segs.segments.size(); ++i) {
      const double bp = segs.segments[i].alpha_lo;
      CHECK(bp == doctest::Approx(segs.segments[i - 1].alpha_hi).epsilon(1e-12));
      const double left = otp_reward_closed_form(inst, bp - 1e-12);
      const double right = otp_reward_closed_form(inst, bp + 1e-12);
      CHECK(left == doctest::Approx(right).epsilon(1e-9));
    }
  }
}

TEST_CASE("tail limit is v_1 T as alpha grows") {
  RateInstance inst;
  inst.bounds = kGamma20;
  inst.rates = {2.0, 7.0, 15.0};  // v_n < U
  auto segs = otp_reward_segments(inst);
  const auto& tail = segs.segments.back();
  REQUIRE(tail.form == SegmentForm::kCPlusDOverAlpha);
  CHECK(tail.c0 == doctest::Approx(2.0 * kGamma20.T()).epsilon(1e-12));
  CHECK(otp_reward_closed_form(inst, 1e6) ==
        doctest::Approx(otp_simulate(inst, 1e6)).epsilon(1e-6));
  CHECK(otp_reward_closed_form(inst, 1e9) == doctest::Approx(tail.c0).epsilon(1e-6));
}

TEST_CASE("tail is c + d/alpha even when the top rate reaches U") {
  RateInstance inst;
  inst.bounds = kGamma20;
  inst.rates = {4.0, 20.0};  // v_n = U
  for (double alpha : {2.0, 5.0, 50.0}) {
    CHECK(otp_reward_closed_form(inst, alpha) ==
          doctest::Approx(otp_simulate(inst, alpha)).epsilon(1e-10));
  }
}

TEST_CASE("non-increasing rates can be eliminated") {
  Rng rng = seeded_rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = random_increasing_instance(rng, kGamma20);
    RateInstance padded = inst;
    padded.rates.clear();
    double running_max = 0.0;
    for (double v : inst.rates) {
      padded.rates.push_back(v);
      running_max = std::max(running_max, v);
      // Insert a dominated rate after each original one.
      padded.rates.push_back(std::max(kGamma20.L, running_max * 0.7));
    }
    for (double alpha : {0.3, 1.0, 2.7})
      CHECK(otp_simulate(padded, alpha) ==
            doctest::Approx(otp_simulate(inst, alpha)).epsilon(1e-12));
  }
}

TEST_CASE("lipschitz bound is zero on the constant segment and valid globally") {
  RateInstance single;
  single.bounds = kGamma20;
  single.rates = {5.0};
  const double beta1 = std::log(5.0) / std::log(20.0);
  CHECK(otp_lipschitz_bound(single, beta1 * 0.1, beta1 * 0.9) == 0.0);

  RateInstance inst;
  inst.bounds = kGamma20;
  inst.rates = {2.0, 7.0, 15.0};
  auto segs = otp_reward_segments(inst);
  const double first_bp = segs.segments.front().alpha_hi;
  CHECK(otp_lipschitz_bound(inst, first_bp * 0.05, first_bp * 0.5) == 0.0);

  const double lo = 0.2, hi = 5.0;
  const double bound = otp_lipschitz_bound(inst, lo, hi);
  CHECK(bound > 0.0);
  CHECK(std::isfinite(bound));
  const double h = 1e-4;
  for (int i = 0; i < 1000; ++i) {
    const double a = lo + (hi - lo - h) * i / 999.0;
    const double slope =
        std::abs(otp_reward_closed_form(inst, a + h) - otp_reward_closed_form(inst, a)) / h;
    CHECK(slope <= bound + 1e-6);
  }
}
