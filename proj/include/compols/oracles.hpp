#pragma once

// Offline reference solvers: ratio denominators, DF certification, and
// cross-checks for the online algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <vector>

#include "compols/core.hpp"
#include "compols/ev_types.hpp"
#include "compols/set_system.hpp"

namespace compols {

enum class OracleKind { kExact, kFractionalUpperBound, kGreedyLowerBound };

struct OracleResult {
  double value = 0.0;
  OracleKind kind = OracleKind::kExact;
  nlohmann::json witness;
};

// Fractional knapsack: density-descending fill with a fractional boundary
// item. Upper bound on the 0/1 optimum, tight in the small-weight limit.
inline OracleResult fractional_knapsack(const OkpInstance& inst) {
  std::vector<std::size_t> order(inst.items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return inst.items[a].density() > inst.items[b].density();
  });
  double remaining = 1.0, value = 0.0;
  nlohmann::json taken = nlohmann::json::array();
  for (std::size_t idx : order) {
    if (remaining <= 0.0) break;
    const auto& it = inst.items[idx];
    const double w = std::min(it.weight, remaining);
    value += it.density() * w;
    remaining -= w;
    taken.push_back({{"item", idx}, {"weight", w}});
  }
  return {value, OracleKind::kFractionalUpperBound, {{"taken", taken}}};
}

// Exact 0/1 optimum by DP over capacity discretized into `units` pieces.
// Every weight must be representable on the grid.
inline OracleResult knapsack_dp(const OkpInstance& inst, int units = 10000) {
  if (units < 1) throw std::invalid_argument("knapsack_dp: units must be >= 1");
  std::vector<int> w_units;
  w_units.reserve(inst.items.size());
  for (const auto& it : inst.items) {
    const double scaled = it.weight * units;
    const int rounded = static_cast<int>(std::llround(scaled));
    if (rounded < 1 || std::abs(scaled - rounded) > 1e-6)
      throw std::invalid_argument("knapsack_dp: resolution too coarse for item weight");
    w_units.push_back(rounded);
  }
  std::vector<double> dp(units + 1, 0.0);
  std::vector<std::vector<bool>> take(inst.items.size());
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    take[i].assign(units + 1, false);
    for (int c = units; c >= w_units[i]; --c) {
      const double candidate = dp[c - w_units[i]] + inst.items[i].value;
      if (candidate > dp[c]) {
        dp[c] = candidate;
        take[i][c] = true;
      }
    }
  }
  // Recover a witness.
  nlohmann::json chosen = nlohmann::json::array();
  int c = units;
  for (std::size_t i = inst.items.size(); i-- > 0;) {
    if (take[i][c]) {
      chosen.push_back(i);
      c -= w_units[i];
    }
  }
  return {dp[units], OracleKind::kExact, {{"items", chosen}}};
}

namespace detail {

inline std::uint64_t cover_mask(const SetSystem& sys, int subset,
                                const std::vector<int>& target_pos) {
  std::uint64_t mask = 0;
  for (int e : sys.membership[subset])
    if (target_pos[e] >= 0) mask |= std::uint64_t{1} << target_pos[e];
  return mask;
}

inline void set_cover_branch(const std::vector<std::uint64_t>& set_masks,
                             const std::vector<std::vector<int>>& covering_sets,
                             std::uint64_t uncovered, int picked,
                             std::vector<int>& current, int& best,
                             std::vector<int>& best_sets) {
  if (uncovered == 0) {
    if (picked < best) {
      best = picked;
      best_sets = current;
    }
    return;
  }
  if (picked + 1 >= best) return;
  // Branch on the lowest uncovered target.
  int bit = 0;
  while (!((uncovered >> bit) & 1)) ++bit;
  for (int s : covering_sets[bit]) {
    current.push_back(s);
    set_cover_branch(set_masks, covering_sets, uncovered & ~set_masks[s],
                     picked + 1, current, best, best_sets);
    current.pop_back();
  }
}

}  // namespace detail

// Exact minimum set cover for the target elements (branch and bound over the
// subset family; intended for small m).
inline OracleResult set_cover_exact(const SetSystem& sys,
                                    const std::vector<int>& targets) {
  std::vector<int> uniq = targets;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (uniq.empty()) return {0.0, OracleKind::kExact, {{"sets", nlohmann::json::array()}}};
  if (uniq.size() > 63) throw std::invalid_argument("set_cover_exact: too many targets");

  std::vector<int> target_pos(sys.n, -1);
  for (std::size_t i = 0; i < uniq.size(); ++i) target_pos[uniq[i]] = static_cast<int>(i);

  std::vector<std::uint64_t> set_masks(sys.membership.size());
  for (int s = 0; s < sys.m(); ++s) set_masks[s] = detail::cover_mask(sys, s, target_pos);

  std::vector<std::vector<int>> covering_sets(uniq.size());
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    covering_sets[i] = sys.element_sets[uniq[i]];
    if (covering_sets[i].empty())
      throw std::runtime_error("set_cover_exact: uncoverable target element");
    // Prefer big sets first so the bound tightens early.
    std::sort(covering_sets[i].begin(), covering_sets[i].end(), [&](int a, int b) {
      return __builtin_popcountll(set_masks[a]) > __builtin_popcountll(set_masks[b]);
    });
  }

  const std::uint64_t all = uniq.size() == 64 ? ~std::uint64_t{0}
                                              : (std::uint64_t{1} << uniq.size()) - 1;
  int best = static_cast<int>(uniq.size()) + 1;
  std::vector<int> current, best_sets;
  detail::set_cover_branch(set_masks, covering_sets, all, 0, current, best, best_sets);
  return {static_cast<double>(best), OracleKind::kExact, {{"sets", best_sets}}};
}

// Classical greedy cover (max new coverage per step). Approximation only:
// never valid as the denominator of a competitiveness assertion.
inline OracleResult set_cover_greedy(const SetSystem& sys,
                                     const std::vector<int>& targets) {
  std::vector<char> needed(sys.n, 0);
  int remaining = 0;
  for (int t : targets)
    if (!needed[t]) {
      needed[t] = 1;
      ++remaining;
    }
  nlohmann::json picked = nlohmann::json::array();
  int count = 0;
  while (remaining > 0) {
    int best_set = -1, best_gain = 0;
    for (int s = 0; s < sys.m(); ++s) {
      int gain = 0;
      for (int e : sys.membership[s]) gain += needed[e];
      if (gain > best_gain) {
        best_gain = gain;
        best_set = s;
      }
    }
    if (best_set < 0) throw std::runtime_error("set_cover_greedy: uncoverable target");
    for (int e : sys.membership[best_set]) {
      remaining -= needed[e];
      needed[e] = 0;
    }
    picked.push_back(best_set);
    ++count;
  }
  return {static_cast<double>(count), OracleKind::kGreedyLowerBound, {{"sets", picked}}};
}

namespace detail {

// Maximum total energy deliverable to the given demands (caps per request,
// unit capacity per slot) via earliest-deadline-first filling, which is
// optimal for interval windows.
inline double max_deliverable(const std::vector<EvRequest>& requests,
                              const std::vector<double>& demand, int horizon) {
  std::vector<std::size_t> order(requests.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return requests[a].arrival < requests[b].arrival;
  });
  auto cmp = [&](std::size_t a, std::size_t b) {
    return requests[a].departure > requests[b].departure;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> active(cmp);
  std::vector<double> left = demand;
  std::size_t next = 0;
  double delivered = 0.0;
  for (int t = 0; t < horizon; ++t) {
    while (next < order.size() && requests[order[next]].arrival <= t)
      active.push(order[next++]);
    double slot_cap = 1.0;
    while (slot_cap > kTol && !active.empty()) {
      const std::size_t i = active.top();
      if (requests[i].departure < t) {
        active.pop();
        continue;
      }
      const double x = std::min(slot_cap, left[i]);
      if (x <= kTol) {  // exhausted (or never-assigned) demand entry
        active.pop();
        continue;
      }
      left[i] -= x;
      slot_cap -= x;
      delivered += x;
      if (left[i] <= kTol) active.pop();
    }
  }
  return delivered;
}

}  // namespace detail

// Fractional relaxation of offline EAC, solved exactly: deliverable demand
// vectors form a polymatroid, so admitting in density order with the
// marginal deliverable amount is optimal.
inline OracleResult eac_fractional_opt(const std::vector<EvRequest>& requests,
                                       int horizon) {
  std::vector<std::size_t> order(requests.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return requests[a].density() > requests[b].density();
  });
  std::vector<double> demand(requests.size(), 0.0);
  double prev = 0.0, value = 0.0;
  nlohmann::json fractions = nlohmann::json::array();
  for (std::size_t idx : order) {
    demand[idx] = requests[idx].energy;
    const double now = detail::max_deliverable(requests, demand, horizon);
    const double delivered = now - prev;
    prev = now;
    if (delivered > kTol) {
      value += requests[idx].density() * delivered;
      fractions.push_back({{"request", idx}, {"fraction", delivered / requests[idx].energy}});
    }
  }
  return {value, OracleKind::kFractionalUpperBound, {{"fractions", fractions}}};
}

}  // namespace compols
