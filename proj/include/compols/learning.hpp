#pragma once

// Online parameter selection over a finite grid: Hedge (full information),
// EXP3 (bandit feedback), and a previous-best heuristic, plus a driver that
// records rewards, choices, and the regret trace.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "compols/core.hpp"

namespace compols {

struct ParameterGrid {
  std::vector<double> points;  // increasing

  int size() const { return static_cast<int>(points.size()); }

  // K points log-uniform over [lo, hi].
  static ParameterGrid log_uniform(double lo, double hi, int k = 21) {
    if (!(lo > 0.0) || !(hi >= lo) || k < 1)
      throw std::invalid_argument("ParameterGrid: need 0 < lo <= hi and k >= 1");
    ParameterGrid grid;
    grid.points.reserve(k);
    if (k == 1) {
      grid.points.push_back(std::sqrt(lo * hi));
      return grid;
    }
    const double step = (std::log(hi) - std::log(lo)) / (k - 1);
    for (int i = 0; i < k; ++i) grid.points.push_back(std::exp(std::log(lo) + i * step));
    grid.points.front() = lo;
    grid.points.back() = hi;
    return grid;
  }

  // Index of the grid point closest to x (for seeding baselines).
  int nearest(double x) const {
    int best = 0;
    for (int i = 1; i < size(); ++i)
      if (std::abs(points[i] - x) < std::abs(points[best] - x)) best = i;
    return best;
  }
};

enum class LearnerKind { kHedge, kExp3, kPreviousBest };

inline double hedge_default_eta(int k, int rounds) {
  if (k < 2 || rounds < 1) return 1.0;
  return std::sqrt(2.0 * std::log(static_cast<double>(k)) / rounds);
}

namespace detail {

// Sample an index from softmax(eta * score).
inline int softmax_sample(const std::vector<double>& score, double eta, Rng& rng) {
  const double m = *std::max_element(score.begin(), score.end());
  std::vector<double> p(score.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    p[i] = std::exp(eta * (score[i] - m));
    sum += p[i];
  }
  double u = rng.uniform() * sum;
  for (std::size_t i = 0; i < p.size(); ++i) {
    u -= p[i];
    if (u <= 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace detail

// Hedge over cumulative rewards (full-information feedback).
struct Hedge {
  double eta;
  std::vector<double> cumulative;

  Hedge(int k, double learning_rate) : eta(learning_rate), cumulative(k, 0.0) {
    if (k < 1 || !(eta > 0.0)) throw std::invalid_argument("Hedge: bad arguments");
  }

  std::vector<double> probs() const {
    const double m = *std::max_element(cumulative.begin(), cumulative.end());
    std::vector<double> p(cumulative.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = std::exp(eta * (cumulative[i] - m));
      sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
  }

  int select(Rng& rng) { return detail::softmax_sample(cumulative, eta, rng); }

  void update(const std::vector<double>& rewards) {
    if (rewards.size() != cumulative.size())
      throw std::invalid_argument("Hedge::update: reward size mismatch");
    for (std::size_t i = 0; i < rewards.size(); ++i) cumulative[i] += rewards[i];
  }
};

// EXP3 with explicit exploration mixing (bandit feedback).
struct Exp3 {
  double gamma_explore;
  std::vector<double> log_weight;
  std::vector<double> last_probs;

  Exp3(int k, double gamma) : gamma_explore(gamma), log_weight(k, 0.0) {
    if (k < 1 || !(gamma > 0.0) || gamma > 1.0)
      throw std::invalid_argument("Exp3: need gamma in (0, 1]");
  }

  static double default_gamma(int k, int rounds) {
    if (k < 2 || rounds < 1) return 0.1;
    const double g = std::sqrt(k * std::log(static_cast<double>(k)) / ((std::exp(1.0) - 1.0) * rounds));
    return std::min(1.0, g);
  }

  const std::vector<double>& probs() {
    const int k = static_cast<int>(log_weight.size());
    const double m = *std::max_element(log_weight.begin(), log_weight.end());
    last_probs.assign(k, 0.0);
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      last_probs[i] = std::exp(log_weight[i] - m);
      sum += last_probs[i];
    }
    for (int i = 0; i < k; ++i)
      last_probs[i] = (1.0 - gamma_explore) * last_probs[i] / sum + gamma_explore / k;
    return last_probs;
  }

  int select(Rng& rng) {
    const auto& p = probs();
    double u = rng.uniform();
    for (std::size_t i = 0; i < p.size(); ++i) {
      u -= p[i];
      if (u <= 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
  }

  // Importance-weighted update for the pulled arm only; reward in [0, 1].
  void update(int arm, double reward) {
    if (arm < 0 || arm >= static_cast<int>(log_weight.size()))
      throw std::invalid_argument("Exp3::update: arm out of range");
    if (reward < -1e-12 || reward > 1.0 + 1e-12)
      throw std::invalid_argument("Exp3::update: reward outside [0, 1]");
    const double k = static_cast<double>(log_weight.size());
    const double estimate = reward / last_probs[arm];
    log_weight[arm] += gamma_explore * estimate / k;
  }
};

// Next round plays whichever arm did best last round; first round plays the
// baseline. Ties break toward the baseline, then the lower index.
inline int previous_best_select(const std::vector<double>& previous_rewards,
                                int baseline_index) {
  if (previous_rewards.empty()) return baseline_index;
  int best = 0;
  for (int i = 1; i < static_cast<int>(previous_rewards.size()); ++i) {
    if (previous_rewards[i] > previous_rewards[best] + kTol ||
        (std::abs(previous_rewards[i] - previous_rewards[best]) <= kTol &&
         i == baseline_index && best != baseline_index))
      best = i;
  }
  if (std::abs(previous_rewards[baseline_index] - previous_rewards[best]) <= kTol)
    return baseline_index;
  return best;
}

// Sample an arm from cumulative past full-information rewards (Hedge rule).
inline int hedge_select(const std::vector<std::vector<double>>& past_rewards, int k,
                        double eta, Rng& rng) {
  std::vector<double> cumulative(k, 0.0);
  for (const auto& row : past_rewards) {
    if (static_cast<int>(row.size()) != k)
      throw std::invalid_argument("hedge_select: reward row arity mismatch");
    for (int i = 0; i < k; ++i) {
      if (row[i] < -1e-12 || row[i] > 1.0 + 1e-12)
        throw std::invalid_argument("hedge_select: reward outside [0, 1]");
      cumulative[i] += row[i];
    }
  }
  return detail::softmax_sample(cumulative, eta, rng);
}

struct LearningRun {
  std::vector<std::vector<double>> rewards;  // rounds x arms, each in [0, 1]
  std::vector<int> chosen;                   // arm index per round
  std::vector<std::vector<double>> weights;  // per-round selection distribution
  std::vector<double> regret;                // cumulative regret trace
  int best_fixed_arm = 0;
};

// Recompute the regret trace against the best fixed arm in hindsight. Used
// both by run_learning and by tests that replay a stored run.
inline std::vector<double> regret_trace(const std::vector<std::vector<double>>& rewards,
                                        const std::vector<int>& chosen,
                                        int* best_arm_out = nullptr) {
  const int rounds = static_cast<int>(rewards.size());
  if (rounds == 0) return {};
  const int k = static_cast<int>(rewards[0].size());
  std::vector<double> totals(k, 0.0);
  for (const auto& row : rewards)
    for (int i = 0; i < k; ++i) totals[i] += row[i];
  const int best = static_cast<int>(
      std::max_element(totals.begin(), totals.end()) - totals.begin());
  if (best_arm_out) *best_arm_out = best;

  std::vector<double> trace(rounds, 0.0);
  double got = 0.0, fixed = 0.0;
  for (int t = 0; t < rounds; ++t) {
    got += rewards[t][chosen[t]];
    fixed += rewards[t][best];
    trace[t] = fixed - got;
  }
  return trace;
}

// Driver: reward_fn(round) must return one reward in [0, 1] per grid arm.
inline LearningRun run_learning(const ParameterGrid& grid,
                                const std::function<std::vector<double>(int)>& reward_fn,
                                int rounds, LearnerKind learner, std::uint64_t seed,
                                double eta = 0.0, int baseline_index = 0) {
  const int k = grid.size();
  if (rounds < 1) throw std::invalid_argument("run_learning: rounds must be >= 1");
  if (baseline_index < 0 || baseline_index >= k)
    throw std::invalid_argument("run_learning: baseline index out of range");
  Rng rng = seeded_rng(seed);
  Hedge hedge(k, eta > 0.0 ? eta : hedge_default_eta(k, rounds));
  Exp3 exp3(k, eta > 0.0 ? std::min(1.0, eta) : Exp3::default_gamma(k, rounds));

  LearningRun run;
  run.rewards.reserve(rounds);
  run.chosen.reserve(rounds);
  for (int t = 0; t < rounds; ++t) {
    int arm = 0;
    switch (learner) {
      case LearnerKind::kHedge:
        run.weights.push_back(hedge.probs());
        arm = hedge.select(rng);
        break;
      case LearnerKind::kExp3:
        run.weights.push_back(exp3.probs());
        arm = exp3.select(rng);
        break;
      case LearnerKind::kPreviousBest:
        arm = run.rewards.empty()
                  ? baseline_index
                  : previous_best_select(run.rewards.back(), baseline_index);
        run.weights.emplace_back(k, 0.0);
        run.weights.back()[arm] = 1.0;
        break;
    }
    std::vector<double> row = reward_fn(t);
    if (static_cast<int>(row.size()) != k)
      throw std::invalid_argument("run_learning: reward_fn arity mismatch");
    for (double r : row)
      if (r < -1e-9 || r > 1.0 + 1e-9)
        throw std::invalid_argument("run_learning: reward outside [0, 1]");
    if (learner == LearnerKind::kHedge) hedge.update(row);
    if (learner == LearnerKind::kExp3) exp3.update(arm, row[arm]);
    run.chosen.push_back(arm);
    run.rewards.push_back(std::move(row));
  }
  run.regret = regret_trace(run.rewards, run.chosen, &run.best_fixed_arm);
  return run;
}

}  // namespace compols
