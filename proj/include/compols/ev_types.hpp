#pragma once

// Request and station types for the EV admission-control problem.

#include <stdexcept>
#include <vector>

namespace compols {

struct EvRequest {
  int arrival = 0;      // first feasible slot
  int departure = 0;    // last feasible slot, >= arrival
  double energy = 0.0;  // fraction of per-slot unit capacity
  double value = 0.0;

  double density() const { return value / energy; }
  int window_slots() const { return departure - arrival + 1; }
};

struct StationState {
  std::vector<double> z;  // per-slot utilization in [0,1]
  double total_value = 0.0;

  explicit StationState(int horizon) : z(horizon, 0.0) {
    if (horizon < 1) throw std::invalid_argument("StationState: horizon must be >= 1");
  }
  int horizon() const { return static_cast<int>(z.size()); }
};

struct ValueModel {
  double a = 0.72;  // price scale: 12 hours x average unit price rate
  double b = 2.0;   // demand-rate weight
  // Piecewise-constant expected occupancy per hour of day.
  std::vector<double> hourly_rate = std::vector<double>(24, 1.0);
};

}  // namespace compols
