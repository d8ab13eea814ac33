#pragma once

// EV admission control: water-filling candidate schedules over a
// time-slotted station, threshold admission with the shared curve, value
// estimation for traces without prices, and CSV ingestion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "compols/core.hpp"
#include "compols/ev_types.hpp"
#include "compols/okp.hpp"
#include "compols/oracles.hpp"

namespace compols {

struct InfeasibleScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Chunked water-fill: split the demand into pieces and send each piece to
// the feasible window slot with the smallest marginal cost (ties: lower
// utilization, then lower slot index). Returns per-slot energy totals.
inline std::vector<double> water_fill(const ThresholdCurve& curve,
                                      const StationState& state, const EvRequest& req,
                                      double chunk) {
  if (!(chunk > 0.0) || chunk > req.energy + kTol)
    throw std::invalid_argument("water_fill: chunk must be in (0, energy]");
  if (req.arrival < 0 || req.departure >= state.horizon() || req.arrival > req.departure)
    throw std::invalid_argument("water_fill: request window outside horizon");

  double free_capacity = 0.0;
  for (int t = req.arrival; t <= req.departure; ++t)
    free_capacity += std::max(0.0, 1.0 - state.z[t]);
  if (free_capacity < req.energy - kTol)
    throw InfeasibleScheduleError("water_fill: window cannot absorb the demand");

  std::vector<double> schedule(state.z.size(), 0.0);
  double remaining = req.energy;
  while (remaining > kTol) {
    double piece = std::min(chunk, remaining);
    int best = -1;
    double best_psi = std::numeric_limits<double>::infinity();
    double best_util = std::numeric_limits<double>::infinity();
    for (int t = req.arrival; t <= req.departure; ++t) {
      const double util = state.z[t] + schedule[t];
      if (util >= 1.0 - kTol) continue;
      const double cost = psi(curve, util);
      if (cost < best_psi - kTol ||
          (cost < best_psi + kTol && util < best_util - kTol)) {
        best = t;
        best_psi = cost;
        best_util = util;
      }
    }
    if (best < 0) throw InfeasibleScheduleError("water_fill: no slot left");
    const double fit = std::min(piece, 1.0 - (state.z[best] + schedule[best]));
    schedule[best] += fit;
    remaining -= fit;
  }
  return schedule;
}

// One admission decision; capacity rejects are distinct from threshold
// rejects in the decision record.
inline std::pair<DecisionRecord, StationState> eac_step(const ThresholdCurve& curve,
                                                        const StationState& state,
                                                        const EvRequest& req,
                                                        double chunk) {
  std::vector<double> schedule;
  try {
    schedule = water_fill(curve, state, req, chunk);
  } catch (const InfeasibleScheduleError&) {
    return {{Decision::kCapacityReject, 0.0}, state};
  }
  double estimated_cost = 0.0;
  for (int t = req.arrival; t <= req.departure; ++t)
    if (schedule[t] > 0.0) estimated_cost += psi(curve, state.z[t]) * schedule[t];
  if (req.value - estimated_cost < -kTol) return {{Decision::kReject, 0.0}, state};

  StationState next = state;
  for (int t = req.arrival; t <= req.departure; ++t)
    next.z[t] = std::min(1.0, next.z[t] + schedule[t]);
  next.total_value += req.value;
  return {{Decision::kAdmit, req.energy}, next};
}

inline double default_chunk(double weight_cap, double energy) {
  return std::min(weight_cap, energy) / 4.0;
}

inline RunResult eac_run(const ThresholdCurve& curve,
                         const std::vector<EvRequest>& requests, int horizon,
                         double chunk = 0.0, double weight_cap = kDefaultWeightCap) {
  StationState state(horizon);
  RunResult result;
  for (const auto& req : requests) {
    const double c = chunk > 0.0 ? std::min(chunk, req.energy) : default_chunk(weight_cap, req.energy);
    auto [record, next] = eac_step(curve, state, req, c);
    result.decisions.push_back(record);
    state = next;
  }
  result.alg_value = state.total_value;
  result.opt_value = eac_fractional_opt(requests, horizon).value;
  result.ratio = result.alg_value > 0.0 ? result.opt_value / result.alg_value
                                        : (result.opt_value > 0.0
                                               ? std::numeric_limits<double>::infinity()
                                               : 1.0);
  result.final_state = {{"z", state.z}, {"total_value", state.total_value}};
  return result;
}

struct EacInstance {
  DensityBounds bounds;
  double weight_cap = kDefaultWeightCap;
  int horizon = 24;
  std::vector<EvRequest> requests;
};

// {"type":"eac","L":...,"U":...,"weight_cap":...,"horizon":...,
//  "requests":[{"a":...,"d":...,"e":...,"v":...},...]}
inline nlohmann::json to_json(const EacInstance& inst) {
  nlohmann::json j;
  j["type"] = "eac";
  j["L"] = inst.bounds.L;
  j["U"] = inst.bounds.U;
  j["weight_cap"] = inst.weight_cap;
  j["horizon"] = inst.horizon;
  auto& reqs = j["requests"] = nlohmann::json::array();
  for (const auto& r : inst.requests)
    reqs.push_back({{"a", r.arrival}, {"d", r.departure}, {"e", r.energy}, {"v", r.value}});
  return j;
}

inline EacInstance eac_from_json(const nlohmann::json& j) {
  if (j.value("type", "") != "eac")
    throw std::invalid_argument("expected instance of type \"eac\"");
  EacInstance inst;
  inst.bounds = DensityBounds(j.at("L").get<double>(), j.at("U").get<double>());
  inst.weight_cap = j.value("weight_cap", kDefaultWeightCap);
  inst.horizon = j.at("horizon").get<int>();
  for (const auto& r : j.at("requests"))
    inst.requests.push_back({r.at("a").get<int>(), r.at("d").get<int>(),
                             r.at("e").get<double>(), r.at("v").get<double>()});
  return inst;
}

struct ValueEstimate {
  double value = 0.0;
  bool clipped = false;
};

// v = a (n_i + b e/(d - a)), clipped into the admissible density band.
inline ValueEstimate estimate_value(const ValueModel& model, const DensityBounds& bounds,
                                    int arrival, int departure, double energy,
                                    double occupancy) {
  if (departure <= arrival)
    throw std::invalid_argument("estimate_value: zero-length window");
  const double raw = model.a * (occupancy + model.b * energy / (departure - arrival));
  const double lo = bounds.L * energy, hi = bounds.U * energy;
  ValueEstimate est;
  est.value = std::clamp(raw, lo, hi);
  est.clipped = raw < lo || raw > hi;
  return est;
}

// Maximum-likelihood piecewise-constant daily arrival profile: mean arrival
// count per hour-of-day bucket.
inline std::vector<double> fit_hourly_rates(const std::vector<double>& arrival_hours,
                                            int days) {
  std::vector<double> rate(24, 0.0);
  for (double h : arrival_hours) {
    const int bucket = std::min(23, std::max(0, static_cast<int>(h) % 24));
    rate[bucket] += 1.0;
  }
  const double denom = std::max(1, days);
  for (double& r : rate) r /= denom;
  return rate;
}

struct IngestResult {
  std::vector<EvRequest> requests;
  int warnings = 0;       // rows skipped
  int clipped_values = 0; // density-band clips in value estimation
};

namespace detail {

// Hours since the Unix-like epoch of the trace's first day; only the date
// arithmetic needed for slotting, no timezone handling.
inline bool parse_iso8601_hours(const std::string& ts, double& hours_out) {
  int y, mo, d, h, mi, s;
  if (std::sscanf(ts.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6 &&
      std::sscanf(ts.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6)
    return false;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
      s < 0 || s > 60)
    return false;
  // Days since civil epoch (Howard Hinnant's algorithm).
  const int yy = y - (mo <= 2);
  const int era = (yy >= 0 ? yy : yy - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(yy - era * 400);
  const unsigned doy = (153u * (mo + (mo > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  const long days = era * 146097L + static_cast<long>(doe) - 719468L;
  hours_out = days * 24.0 + h + mi / 60.0 + s / 3600.0;
  return true;
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding whitespace.
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

}  // namespace detail

// Reads `arrival_ts, departure_ts, energy_kwh` rows, slots them into the
// horizon, normalizes energy by the station capacity per slot, and fills
// values from the occupancy model.
inline IngestResult ingest_ev_csv(const std::string& path, const ValueModel& model,
                                  const DensityBounds& bounds, double slot_hours,
                                  double capacity_kwh_per_slot, int horizon) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_ev_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) return {};
  auto header = detail::split_csv_row(line);
  int col_a = -1, col_d = -1, col_e = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "arrival_ts") col_a = static_cast<int>(i);
    if (header[i] == "departure_ts") col_d = static_cast<int>(i);
    if (header[i] == "energy_kwh") col_e = static_cast<int>(i);
  }
  if (col_a < 0 || col_d < 0 || col_e < 0)
    throw std::runtime_error("ingest_ev_csv: missing required columns");

  IngestResult out;
  double origin_hours = std::numeric_limits<double>::quiet_NaN();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = detail::split_csv_row(line);
    const int needed = std::max({col_a, col_d, col_e});
    double ah = 0.0, dh = 0.0, energy = 0.0;
    if (static_cast<int>(fields.size()) <= needed ||
        !detail::parse_iso8601_hours(fields[col_a], ah) ||
        !detail::parse_iso8601_hours(fields[col_d], dh)) {
      ++out.warnings;
      continue;
    }
    try {
      energy = std::stod(fields[col_e]);
    } catch (...) {
      ++out.warnings;
      continue;
    }
    if (dh < ah || !(energy > 0.0)) {
      ++out.warnings;
      continue;
    }
    if (std::isnan(origin_hours))
      origin_hours = std::floor(ah / 24.0) * 24.0;  // midnight of first day

    EvRequest req;
    req.arrival = static_cast<int>(std::floor((ah - origin_hours) / slot_hours));
    req.departure = static_cast<int>(std::floor((dh - origin_hours) / slot_hours));
    req.energy = energy / capacity_kwh_per_slot;
    if (req.arrival < 0 || req.departure >= horizon || req.arrival > req.departure) {
      ++out.warnings;
      continue;
    }
    const int hour_bucket = static_cast<int>(std::fmod(ah, 24.0));
    const double occupancy = model.hourly_rate[std::min(23, std::max(0, hour_bucket))];
    if (req.departure == req.arrival) {
      // Degenerate window: value from the density mid-band.
      req.value = 0.5 * (bounds.L + bounds.U) * req.energy;
    } else {
      auto est = estimate_value(model, bounds, req.arrival, req.departure, req.energy,
                                occupancy);
      req.value = est.value;
      out.clipped_values += est.clipped ? 1 : 0;
    }
    out.requests.push_back(req);
  }
  return out;
}

// Synthetic over-demanded day: arrivals follow the model's hourly profile,
// windows span a few slots, values are uniform in the density band.
inline std::vector<EvRequest> eac_synth_day(const DensityBounds& bounds, int horizon,
                                            int request_count, double weight_cap,
                                            Rng& rng) {
  std::vector<EvRequest> reqs;
  reqs.reserve(request_count);
  for (int i = 0; i < request_count; ++i) {
    EvRequest r;
    // Peak-loaded arrivals: concentrate demand midday.
    const double u = rng.uniform();
    r.arrival = static_cast<int>(std::min<double>(horizon - 1.0, u * u * horizon));
    r.departure = std::min(horizon - 1, r.arrival + 1 + static_cast<int>(rng.uniform_index(4)));
    r.energy = weight_cap * (0.25 + 0.75 * rng.uniform());
    r.value = rng.uniform(bounds.L, bounds.U) * r.energy;
    reqs.push_back(r);
  }
  return reqs;
}

}  // namespace compols
