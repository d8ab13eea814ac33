#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "compols/eac.hpp"
#include "compols/okp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace compols;

namespace {

const DensityBounds kBand(1.0, 20.0);

// Pseudo-cost of a full chunk assignment: sum over slots of the integral of
// psi over the utilization added there.
double assignment_cost(const ThresholdCurve& curve, const StationState& state,
                       const std::vector<int>& slots_per_piece, double piece,
                       int window_lo) {
  std::vector<double> added(state.z.size(), 0.0);
  double cost = 0.0;
  for (int rel : slots_per_piece) {
    const int t = window_lo + rel;
    // Integral approximated at the piece's left endpoint, matching the
    // implementation's discretization.
    cost += psi(curve, state.z[t] + added[t]) * piece;
    added[t] += piece;
    if (state.z[t] + added[t] > 1.0 + 1e-12) return 1e18;  // infeasible
  }
  return cost;
}

}  // namespace

TEST_CASE("water_fill splits the demand across the cheapest slots") {
  ThresholdCurve curve(kBand, 1.0);
  StationState state(2);
  EvRequest req{0, 1, 0.2, 2.0};
  auto schedule = water_fill(curve, state, req, 0.1);
  CHECK(schedule[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(schedule[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("water_fill routes around the expensive slot") {
  ThresholdCurve curve(kBand, 1.0);
  StationState state(2);
  // T(gamma=20) ~ 0.2503, so z=0.5 is past the knee and strictly pricier.
  state.z = {0.5, 0.1};
  EvRequest req{0, 1, 0.2, 2.0};
  auto schedule = water_fill(curve, state, req, 0.1);
  CHECK(schedule[0] == doctest::Approx(0.0));
  CHECK(schedule[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("water_fill single-slot window takes everything") {
  ThresholdCurve curve(kBand, 1.0);
  StationState state(1);
  EvRequest req{0, 0, 0.3, 2.0};
  auto schedule = water_fill(curve, state, req, 0.3);
  CHECK(schedule[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(water_fill(curve, state, req, 0.0), std::invalid_argument);
}

TEST_CASE("water_fill reports infeasible windows") {
  ThresholdCurve curve(kBand, 1.0);
  StationState state(2);
  state.z = {1.0, 0.9};
  const EvRequest too_big{0, 1, 0.5, 5.0};
  CHECK_THROWS_AS(water_fill(curve, state, too_big, 0.1), InfeasibleScheduleError);
  const EvRequest past_horizon{0, 5, 0.1, 1.0};
  CHECK_THROWS_AS(water_fill(curve, state, past_horizon, 0.1), std::invalid_argument);
}

TEST_CASE("chunked water-fill is near-optimal at desk scale") {
  Rng rng = seeded_rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    ThresholdCurve curve(kBand, 0.5 + 2.0 * rng.uniform());
    StationState state(3);
    // Keep every slot well below 1 so no piece gets truncated by the cap;
    // the replay below assumes water_fill moved whole pieces.
    for (auto& z : state.z) z = 0.5 * rng.uniform();
    const int pieces = 2 + static_cast<int>(rng.uniform_index(5));  // up to 6
    const double piece = 0.02 + 0.05 * rng.uniform();
    EvRequest req{0, 2, pieces * piece, 1.0};

    auto schedule = water_fill(curve, state, req, piece);
    double chunked_cost = 0.0;
    {
      std::vector<double> added(3, 0.0);
      // Recompute cost exactly as the exhaustive reference does.
      // water_fill assigns greedily; replay its schedule piecewise.
      std::vector<double> remaining = schedule;
      for (int k = 0; k < pieces; ++k) {
        int best = -1;
        double best_psi = 1e18, best_util = 1e18;
        for (int t = 0; t < 3; ++t) {
          if (remaining[t] < piece - 1e-12) continue;
          const double util = state.z[t] + added[t];
          const double c = psi(curve, util);
          if (c < best_psi - 1e-12 || (c < best_psi + 1e-12 && util < best_util - 1e-12)) {
            best = t;
            best_psi = c;
            best_util = util;
          }
        }
        REQUIRE(best >= 0);
        chunked_cost += best_psi * piece;
        added[best] += piece;
        remaining[best] -= piece;
      }
    }

    // Exhaustive minimum over all per-piece slot assignments (3^pieces).
    double best_cost = 1e18;
    std::vector<int> assign(pieces, 0);
    const int total = static_cast<int>(std::pow(3, pieces));
    for (int code = 0; code < total; ++code) {
      int c = code;
      for (int k = 0; k < pieces; ++k) {
        assign[k] = c % 3;
        c /= 3;
      }
      best_cost = std::min(best_cost, assignment_cost(curve, state, assign, piece, 0));
    }
    const double marginal = psi(curve, 0.99) * piece;  // one chunk's worst marginal
    CHECK(chunked_cost <= best_cost + marginal + 1e-9);
  }
}

TEST_CASE("eac_step admission and rejection") {
  ThresholdCurve curve(kBand, 1.0);
  StationState fresh(3);
  auto [d1, s1] = eac_step(curve, fresh, {0, 1, 0.01, 0.2}, 0.005);  // density 20 = U
  CHECK(d1.decision == Decision::kAdmit);
  CHECK(s1.total_value == doctest::Approx(0.2));

  StationState full(2);
  full.z = {1.0, 1.0};
  auto [d2, s2] = eac_step(curve, full, {0, 1, 0.1, 2.0}, 0.05);
  CHECK(d2.decision == Decision::kCapacityReject);

  // Density-L request when every window slot sits above T: threshold-reject.
  StationState busy(2);
  busy.z = {0.6, 0.6};
  auto [d3, s3] = eac_step(curve, busy, {0, 1, 0.01, 0.01 * kBand.L}, 0.005);
  CHECK(d3.decision == Decision::kReject);
  (void)s2;
  (void)s3;
}

TEST_CASE("eac_run on one admissible request has ratio 1") {
  ThresholdCurve curve(kBand, 1.0);
  std::vector<EvRequest> reqs = {{2, 5, 0.05, 0.5}};
  auto result = eac_run(curve, reqs, 8);
  CHECK(result.alg_value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(result.ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("capacity and demand-satisfaction invariants") {
  Rng rng = seeded_rng(41);
  ThresholdCurve curve(kBand, 1.0);
  const int horizon = 12;
  auto reqs = eac_synth_day(kBand, horizon, 600, 5e-2, rng);
  StationState state(horizon);
  for (const auto& req : reqs) {
    auto [rec, next] = eac_step(curve, state, req, default_chunk(5e-2, req.energy));
    if (rec.decision == Decision::kAdmit) {
      double delivered = 0.0;
      for (int t = 0; t < horizon; ++t) {
        CHECK(next.z[t] >= state.z[t] - 1e-12);
        CHECK(next.z[t] <= 1.0 + 1e-9);
        delivered += next.z[t] - state.z[t];
      }
      CHECK(delivered >= req.energy - 1e-9);
    }
    state = next;
  }
}

TEST_CASE("profit ratio respects the threshold guarantee on over-demanded days") {
  const double guarantee = okp_df(kBand.gamma(), 1.0) * (std::log(kBand.gamma()) + 1.0);
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng = seeded_rng(100 + seed);
    auto reqs = eac_synth_day(kBand, 24, 900, 5e-2, rng);
    auto result = eac_run(ThresholdCurve(kBand, 1.0), reqs, 24);
    CHECK(result.ratio <= guarantee + 1e-9);
  }
}

TEST_CASE("a more aggressive alpha wins on a mid-density flood day") {
  // Uniform mid-density demand slightly above capacity and nothing better
  // coming: the baseline's rising threshold turns profitable requests away,
  // while alpha < 1 keeps admitting.
  Rng rng = seeded_rng(500);
  std::vector<EvRequest> reqs;
  for (int i = 0; i < 160; ++i) {
    const int slot = static_cast<int>(rng.uniform_index(4));
    const double e = 5e-2 * (0.5 + 0.5 * rng.uniform());
    reqs.push_back({slot, slot, e, rng.uniform(4.0, 6.0) * e});
  }
  const double base = eac_run(ThresholdCurve(kBand, 1.0), reqs, 4, 0.0, 5e-2).ratio;
  bool improved = false;
  for (double alpha : {0.5, 0.635, 0.8})
    if (eac_run(ThresholdCurve(kBand, alpha), reqs, 4, 0.0, 5e-2).ratio < base - 1e-9)
      improved = true;
  CHECK(improved);
}

TEST_CASE("single-slot eac reduces to the knapsack threshold rule") {
  Rng rng = seeded_rng(8);
  OkpInstance inst;
  inst.bounds = kBand;
  for (int i = 0; i < 400; ++i) {
    const double w = 1e-3 * (0.3 + 0.7 * rng.uniform());
    inst.items.push_back({rng.uniform(kBand.L, kBand.U) * w, w});
  }
  std::vector<EvRequest> reqs;
  for (const auto& it : inst.items) reqs.push_back({0, 0, it.weight, it.value});

  for (double alpha : {0.8, 1.0, 2.0}) {
    auto okp = okp_run(ThresholdCurve(inst.bounds, alpha), inst);
    auto eac = eac_run(ThresholdCurve(inst.bounds, alpha), reqs, 1);
    REQUIRE(okp.decisions.size() == eac.decisions.size());
    for (std::size_t i = 0; i < okp.decisions.size(); ++i) {
      CHECK((okp.decisions[i].decision == Decision::kAdmit) ==
            (eac.decisions[i].decision == Decision::kAdmit));
    }
    CHECK(okp.alg_value == doctest::Approx(eac.alg_value).epsilon(1e-9));
  }
}

TEST_CASE("estimate_value applies the affine model and clips to the band") {
  ValueModel model;  // a = 0.72, b = 2
  DensityBounds wide(1e-3, 1e3);
  auto est = estimate_value(model, wide, 0, 5, 10.0, 5.0);
  CHECK(est.value == doctest::Approx(0.72 * (5.0 + 2.0 * 10.0 / 5.0)).epsilon(1e-12));
  CHECK_FALSE(est.clipped);

  ValueModel zero;
  zero.a = 0.72;
  zero.b = 0.0;
  auto clipped = estimate_value(zero, kBand, 0, 5, 0.1, 0.0);
  CHECK(clipped.value == doctest::Approx(kBand.L * 0.1).epsilon(1e-12));
  CHECK(clipped.clipped);
  // b = 0 makes the value window-independent.
  auto w1 = estimate_value(zero, kBand, 0, 2, 0.1, 3.0);
  auto w2 = estimate_value(zero, kBand, 0, 9, 0.1, 3.0);
  CHECK(w1.value == w2.value);

  CHECK_THROWS_AS(estimate_value(model, kBand, 3, 3, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("csv ingestion slots, normalizes, and skips bad rows") {
  const std::string path = "eac_ingest_tmp.csv";
  ValueModel model;
  model.hourly_rate.assign(24, 2.0);

  {
    std::ofstream out(path);
    out << "arrival_ts,departure_ts,energy_kwh\n";
  }
  auto empty = ingest_ev_csv(path, model, kBand, 1.0, 100.0, 24);
  CHECK(empty.requests.empty());
  CHECK(empty.warnings == 0);

  {
    std::ofstream out(path);
    out << "arrival_ts,departure_ts,energy_kwh\n";
    out << "2026-01-05T03:00:00,2026-01-05T07:00:00,10\n";
    out << "2026-01-05T09:00:00,2026-01-05T08:00:00,5\n";  // departs before arriving
  }
  auto result = ingest_ev_csv(path, model, kBand, 1.0, 100.0, 24);
  REQUIRE(result.requests.size() == 1);
  CHECK(result.warnings == 1);
  CHECK(result.requests[0].arrival == 3);
  CHECK(result.requests[0].departure == 7);
  CHECK(result.requests[0].energy == doctest::Approx(0.1).epsilon(1e-12));
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "foo,bar\n";
  }
  CHECK_THROWS(ingest_ev_csv(path, model, kBand, 1.0, 100.0, 24));
  std::remove(path.c_str());
}

TEST_CASE("hourly rate fitting averages per bucket") {
  auto rates = fit_hourly_rates({3.5, 3.9, 15.0, 27.5}, 2);  // 27.5 wraps to hour 3
  CHECK(rates[3] == doctest::Approx(1.5));
  CHECK(rates[15] == doctest::Approx(0.5));
  CHECK(rates[0] == 0.0);
}

TEST_CASE("eac instance JSON round-trip") {
  EacInstance inst;
  inst.bounds = kBand;
  inst.weight_cap = 5e-2;
  inst.horizon = 24;
  inst.requests = {{1, 4, 0.03, 0.3}, {5, 9, 0.01, 0.15}};
  EacInstance back = eac_from_json(to_json(inst));
  CHECK(back.horizon == inst.horizon);
  REQUIRE(back.requests.size() == 2);
  CHECK(back.requests[1].value == inst.requests[1].value);
}
