#pragma once

// Shared domain types, JSON instance I/O, deterministic RNG, validation.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace compols {

// Default absolute tolerance for threshold comparisons.
inline constexpr double kTol = 1e-12;

// Operationalizes the "individually negligible weight" assumption.
inline constexpr double kDefaultWeightCap = 1e-3;

struct DensityBounds {
  double L = 1.0;  // minimum value density
  double U = 1.0;  // maximum value density

  DensityBounds() = default;
  DensityBounds(double lower, double upper) : L(lower), U(upper) {
    if (!(L > 0.0) || !(U >= L))
      throw std::invalid_argument("DensityBounds: need 0 < L <= U");
  }

  // gamma and T are always derived from L, U; never stored separately.
  double gamma() const { return U / L; }
  double T() const { return 1.0 / (std::log(gamma()) + 1.0); }
};

struct KnapsackItem {
  double value = 0.0;   // nonnegative
  double weight = 0.0;  // positive, fraction of unit capacity

  double density() const { return value / weight; }
};

struct OkpInstance {
  DensityBounds bounds;
  std::vector<KnapsackItem> items;  // arrival order
  double weight_cap = kDefaultWeightCap;
};

struct RateInstance {
  DensityBounds bounds;
  std::vector<double> rates;  // arrival order, each in [L, U]
};

enum class Decision {
  kAdmit,
  kReject,           // threshold reject
  kCapacityReject,   // feasible value but no remaining capacity
};

struct DecisionRecord {
  Decision decision = Decision::kReject;
  double amount = 0.0;  // admitted weight / traded fraction / scheduled energy
};

// Outcome of one online run together with its offline reference value.
struct RunResult {
  double alg_value = 0.0;
  double opt_value = 0.0;
  // opt/alg for maximization problems, alg/opt for minimization.
  double ratio = 1.0;
  std::vector<DecisionRecord> decisions;
  nlohmann::json final_state;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_instance(const OkpInstance& inst) {
  ValidationReport report;
  const double L = inst.bounds.L, U = inst.bounds.U;
  for (std::size_t i = 0; i < inst.items.size(); ++i) {
    const auto& it = inst.items[i];
    std::ostringstream os;
    if (!(it.weight > 0.0)) {
      os << "item " << i << ": nonpositive weight " << it.weight;
      report.violations.push_back(os.str());
      continue;
    }
    const double d = it.density();
    if (d < L - kTol) {
      os << "item " << i << ": density " << d << " < L";
      report.violations.push_back(os.str());
    } else if (d > U + kTol) {
      os << "item " << i << ": density " << d << " > U";
      report.violations.push_back(os.str());
    }
    if (it.weight > inst.weight_cap + kTol) {
      std::ostringstream os2;
      os2 << "item " << i << ": weight " << it.weight << " exceeds cap "
          << inst.weight_cap;
      report.violations.push_back(os2.str());
    }
  }
  return report;
}

inline ValidationReport validate_instance(const RateInstance& inst) {
  ValidationReport report;
  for (std::size_t i = 0; i < inst.rates.size(); ++i) {
    if (inst.rates[i] < inst.bounds.L - kTol ||
        inst.rates[i] > inst.bounds.U + kTol) {
      std::ostringstream os;
      os << "rate " << i << ": " << inst.rates[i] << " outside [L, U]";
      report.violations.push_back(os.str());
    }
  }
  return report;
}

// Deterministic random stream. mt19937_64 output is specified by the
// standard, so identical seeds give identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

inline Rng seeded_rng(std::uint64_t seed) { return Rng(seed); }

// ---------------------------------------------------------------------------
// JSON instance schema
//   {"type":"okp","L":...,"U":...,"weight_cap":...,"items":[{"v":..,"w":..}]}
//   {"type":"rate","L":...,"U":...,"rates":[...]}
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const OkpInstance& inst) {
  nlohmann::json j;
  j["type"] = "okp";
  j["L"] = inst.bounds.L;
  j["U"] = inst.bounds.U;
  j["weight_cap"] = inst.weight_cap;
  auto& items = j["items"] = nlohmann::json::array();
  for (const auto& it : inst.items) items.push_back({{"v", it.value}, {"w", it.weight}});
  return j;
}

inline nlohmann::json to_json(const RateInstance& inst) {
  nlohmann::json j;
  j["type"] = "rate";
  j["L"] = inst.bounds.L;
  j["U"] = inst.bounds.U;
  j["rates"] = inst.rates;
  return j;
}

inline OkpInstance okp_from_json(const nlohmann::json& j) {
  if (j.value("type", "") != "okp")
    throw std::invalid_argument("expected instance of type \"okp\"");
  OkpInstance inst;
  inst.bounds = DensityBounds(j.at("L").get<double>(), j.at("U").get<double>());
  inst.weight_cap = j.value("weight_cap", kDefaultWeightCap);
  for (const auto& it : j.at("items"))
    inst.items.push_back({it.at("v").get<double>(), it.at("w").get<double>()});
  return inst;
}

inline RateInstance rate_from_json(const nlohmann::json& j) {
  if (j.value("type", "") != "rate")
    throw std::invalid_argument("expected instance of type \"rate\"");
  RateInstance inst;
  inst.bounds = DensityBounds(j.at("L").get<double>(), j.at("U").get<double>());
  inst.rates = j.at("rates").get<std::vector<double>>();
  return inst;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

inline void save_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace compols
