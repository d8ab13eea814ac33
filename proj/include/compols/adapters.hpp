#pragma once

// Bridges between the online problems and the grid learners: each adapter
// owns a seeded instance generator and maps a round to one normalized reward
// per grid point (alg/opt for maximization, opt/cost capped at 1 for
// minimization).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "compols/core.hpp"
#include "compols/eac.hpp"
#include "compols/learning.hpp"
#include "compols/okp.hpp"
#include "compols/osc.hpp"
#include "compols/otp.hpp"
#include "compols/oracles.hpp"
#include "compols/ski.hpp"

namespace compols {

struct ProblemAdapter {
  ParameterGrid grid;
  int baseline_index = 0;  // grid point closest to the DF = 1 parameter
  std::function<std::vector<double>(int)> reward_fn;  // round -> one reward per arm
};

namespace detail {

// Random OKP instance: mostly low-density supply with an occasional
// high-density tail, enough total weight to exceed capacity.
inline OkpInstance random_okp_instance(const DensityBounds& bounds, Rng& rng,
                                       double weight_cap = 2e-3, int items = 400) {
  OkpInstance inst;
  inst.bounds = bounds;
  inst.weight_cap = weight_cap;
  const bool heavy_tail = rng.uniform() < 0.5;
  for (int i = 0; i < items; ++i) {
    const double w = weight_cap * (0.5 + 0.5 * rng.uniform());
    double d;
    if (heavy_tail && i >= items * 3 / 4)
      d = rng.uniform(0.7 * bounds.U, bounds.U);
    else
      d = rng.uniform(bounds.L, std::min(bounds.U, 2.5 * bounds.L));
    inst.items.push_back({d * w, w});
  }
  return inst;
}

inline RateInstance random_rate_instance(const DensityBounds& bounds, Rng& rng,
                                         int rates = 8) {
  RateInstance inst;
  inst.bounds = bounds;
  double level = bounds.L;
  for (int i = 0; i < rates; ++i) {
    level = std::min(bounds.U, level * (1.0 + rng.uniform() * 0.6));
    inst.rates.push_back(level);
  }
  return inst;
}

}  // namespace detail

inline ProblemAdapter make_okp_adapter(double phi, std::uint64_t seed,
                                       DensityBounds bounds = DensityBounds(1.0, 20.0),
                                       int grid_points = 21) {
  const auto cls = okp_phi_class(bounds.gamma(), phi);
  ProblemAdapter adapter;
  adapter.grid = ParameterGrid::log_uniform(cls.alpha_low, cls.alpha_high, grid_points);
  adapter.baseline_index = adapter.grid.nearest(1.0);
  auto rng = std::make_shared<Rng>(seed);
  adapter.reward_fn = [bounds, rng, grid = adapter.grid](int) {
    const auto inst = detail::random_okp_instance(bounds, *rng);
    const double opt = fractional_knapsack(inst).value;
    std::vector<double> rewards;
    rewards.reserve(grid.size());
    for (double alpha : grid.points) {
      const auto run = okp_run(ThresholdCurve(bounds, alpha), inst);
      rewards.push_back(opt > 0.0 ? std::min(1.0, run.alg_value / opt) : 1.0);
    }
    return rewards;
  };
  return adapter;
}

inline ProblemAdapter make_otp_adapter(double phi, std::uint64_t seed,
                                       DensityBounds bounds = DensityBounds(1.0, 20.0),
                                       int grid_points = 21) {
  const auto cls = okp_phi_class(bounds.gamma(), phi);
  ProblemAdapter adapter;
  adapter.grid = ParameterGrid::log_uniform(cls.alpha_low, cls.alpha_high, grid_points);
  adapter.baseline_index = adapter.grid.nearest(1.0);
  auto rng = std::make_shared<Rng>(seed);
  adapter.reward_fn = [bounds, rng, grid = adapter.grid](int) {
    const auto inst = detail::random_rate_instance(bounds, *rng);
    // Offline optimum sells everything at the highest rate.
    const double opt = *std::max_element(inst.rates.begin(), inst.rates.end());
    std::vector<double> rewards;
    rewards.reserve(grid.size());
    for (double alpha : grid.points)
      rewards.push_back(std::min(1.0, otp_reward_closed_form(inst, alpha) / opt));
    return rewards;
  };
  return adapter;
}

inline ProblemAdapter make_osc_adapter(double phi, std::uint64_t seed, int n = 24,
                                       int m = 12, int arrivals = 12,
                                       int grid_points = 21) {
  const auto cls = osc_phi_class(m, phi);
  ProblemAdapter adapter;
  adapter.grid = ParameterGrid::log_uniform(cls.theta_low, cls.theta_high, grid_points);
  adapter.baseline_index = adapter.grid.nearest(2.0);
  auto rng = std::make_shared<Rng>(seed);
  adapter.reward_fn = [rng, n, m, arrivals, grid = adapter.grid](int round) {
    const auto kind = rng->uniform() < 0.5 ? ScenarioKind::kHighOverlap
                                           : ScenarioKind::kLowOverlap;
    const auto scenario = osc_scenario_generator(kind, n, m, arrivals, rng->next());
    const double opt = set_cover_exact(scenario.system, scenario.arrivals).value;
    std::vector<double> rewards;
    rewards.reserve(grid.size());
    for (double theta : grid.points) {
      const auto run =
          osc_run(scenario.system, scenario.arrivals, theta, 1000003ULL * round + 17);
      rewards.push_back(run.alg_value > 0.0 ? std::min(1.0, opt / run.alg_value) : 1.0);
    }
    return rewards;
  };
  return adapter;
}

inline ProblemAdapter make_eac_adapter(double phi, std::uint64_t seed,
                                       DensityBounds bounds = DensityBounds(1.0, 20.0),
                                       int horizon = 24, int requests = 200,
                                       double weight_cap = 5e-2, int grid_points = 21) {
  const auto cls = okp_phi_class(bounds.gamma(), phi);
  ProblemAdapter adapter;
  adapter.grid = ParameterGrid::log_uniform(cls.alpha_low, cls.alpha_high, grid_points);
  adapter.baseline_index = adapter.grid.nearest(1.0);
  auto rng = std::make_shared<Rng>(seed);
  adapter.reward_fn = [bounds, rng, horizon, requests, weight_cap,
                       grid = adapter.grid](int) {
    const auto day = eac_synth_day(bounds, horizon, requests, weight_cap, *rng);
    const double opt = eac_fractional_opt(day, horizon).value;
    std::vector<double> rewards;
    rewards.reserve(grid.size());
    for (double alpha : grid.points) {
      const auto run = eac_run(ThresholdCurve(bounds, alpha), day, horizon, 0.0, weight_cap);
      rewards.push_back(opt > 0.0 ? std::min(1.0, run.alg_value / opt) : 1.0);
    }
    return rewards;
  };
  return adapter;
}

inline ProblemAdapter make_ski_adapter(double phi, std::uint64_t seed, int p = 20,
                                       int grid_points = 21) {
  const auto interval = ski_phi_class(p, phi);
  ProblemAdapter adapter;
  adapter.grid = ParameterGrid::log_uniform(interval.lo, interval.hi, grid_points);
  for (double& b : adapter.grid.points) b = std::round(b);  // integer policy class
  adapter.baseline_index = adapter.grid.nearest(p);
  auto rng = std::make_shared<Rng>(seed);
  adapter.reward_fn = [rng, p, grid = adapter.grid](int) {
    const int x = 1 + static_cast<int>(rng->uniform_index(4 * p));
    std::vector<double> rewards;
    rewards.reserve(grid.size());
    for (double b : grid.points) {
      const auto [alg, opt] = ski_cost(SkiProblem(p, static_cast<int>(b)), x);
      rewards.push_back(opt / alg);  // cost problem: reward in (0, 1]
    }
    return rewards;
  };
  return adapter;
}

inline ProblemAdapter make_adapter(const std::string& problem, double phi,
                                   std::uint64_t seed) {
  if (problem == "okp") return make_okp_adapter(phi, seed);
  if (problem == "otp") return make_otp_adapter(phi, seed);
  if (problem == "osc") return make_osc_adapter(phi, seed);
  if (problem == "eac") return make_eac_adapter(phi, seed);
  if (problem == "ski") return make_ski_adapter(phi, seed);
  throw std::invalid_argument("make_adapter: unknown problem \"" + problem + "\"");
}

}  // namespace compols
