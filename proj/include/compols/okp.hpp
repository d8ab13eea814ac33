#pragma once

// Parametric threshold algorithm for the online knapsack problem.
// The marginal-cost curve Psi_alpha drives admission; the degradation
// factor and the phi-degraded parameter interval are closed forms.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "compols/core.hpp"
#include "compols/lambert.hpp"
#include "compols/oracles.hpp"

namespace compols {

struct ThresholdCurve {
  DensityBounds bounds;
  double alpha = 1.0;

  ThresholdCurve(DensityBounds b, double a) : bounds(b), alpha(a) {
    if (!(alpha > 0.0)) throw std::invalid_argument("ThresholdCurve: alpha must be > 0");
  }
};

struct OkpState {
  double z = 0.0;            // cumulative capacity utilization
  double total_value = 0.0;
};

// Psi_alpha(z): L on [0,T), min{U, L e^{alpha(z/T - 1)}} on [T,1), +inf at 1.
inline double psi(const ThresholdCurve& curve, double z) {
  if (z < -kTol || z > 1.0 + kTol)
    throw std::invalid_argument("psi: z outside [0, 1]");
  const double L = curve.bounds.L, U = curve.bounds.U, T = curve.bounds.T();
  if (z >= 1.0 - kTol) return std::numeric_limits<double>::infinity();
  if (z < T) return L;
  return std::min(U, L * std::exp(curve.alpha * (z / T - 1.0)));
}

// One admission decision. Admit iff pseudo-utility v - Psi(z) w >= 0 and the
// item still fits; zero pseudo-utility admits.
inline std::pair<Decision, OkpState> okp_step(const ThresholdCurve& curve,
                                              const OkpState& state,
                                              const KnapsackItem& item) {
  if (state.z + item.weight > 1.0 + kTol)
    return {Decision::kCapacityReject, state};
  const double threshold = psi(curve, state.z);
  if (item.value - threshold * item.weight < -kTol)
    return {Decision::kReject, state};
  OkpState next = state;
  next.z = std::min(1.0, state.z + item.weight);
  next.total_value += item.value;
  return {Decision::kAdmit, next};
}

inline RunResult okp_run(const ThresholdCurve& curve, const OkpInstance& inst) {
  RunResult result;
  OkpState state;
  for (const auto& item : inst.items) {
    auto [decision, next] = okp_step(curve, state, item);
    result.decisions.push_back(
        {decision, decision == Decision::kAdmit ? item.weight : 0.0});
    state = next;
  }
  result.alg_value = state.total_value;
  result.opt_value = fractional_knapsack(inst).value;
  result.ratio = result.alg_value > 0.0 ? result.opt_value / result.alg_value
                                        : (result.opt_value > 0.0
                                               ? std::numeric_limits<double>::infinity()
                                               : 1.0);
  result.final_state = {{"z", state.z}, {"total_value", state.total_value}};
  return result;
}

// DF(OKP-Alg(alpha)): alpha*gamma/(alpha+gamma-1) for alpha >= 1,
// alpha*gamma/(alpha+gamma^alpha-1) for alpha in (0,1).
inline double okp_df(double gamma, double alpha) {
  if (!(gamma > 1.0)) throw std::invalid_argument("okp_df: gamma must be > 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("okp_df: alpha must be > 0");
  if (alpha >= 1.0) return alpha * gamma / (alpha + gamma - 1.0);
  return alpha * gamma / (alpha + std::pow(gamma, alpha) - 1.0);
}

struct OkpPhiClass {
  double alpha_low = 1.0;         // bisection root of the alpha<1 branch
  double alpha_high = 1.0;        // phi(gamma-1)/(gamma-phi)
  double alpha_low_lambert = 1.0; // Lambert-W closed form, reported as cross-check
  double lambert_discrepancy = 0.0;
  std::string lambert_branch;     // which real branch matched the bisection root
};

inline OkpPhiClass okp_phi_class(double gamma, double phi) {
  if (!(gamma > 1.0)) throw std::invalid_argument("okp_phi_class: gamma must be > 1");
  if (phi < 1.0 || phi >= gamma)
    throw std::invalid_argument("okp_phi_class: phi must be in [1, gamma)");
  OkpPhiClass cls;
  if (phi == 1.0) {
    cls.alpha_low = cls.alpha_high = cls.alpha_low_lambert = 1.0;
    cls.lambert_branch = "degenerate";
    return cls;
  }
  cls.alpha_high = phi * (gamma - 1.0) / (gamma - phi);

  // DF is strictly decreasing on (0,1], from gamma down to 1, so the root of
  // DF(alpha) = phi is unique in (0,1).
  double lo = 1e-12, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (okp_df(gamma, mid) > phi)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }
  cls.alpha_low = 0.5 * (lo + hi);

  // Lambert-W closed form: -phi/(gamma-phi) - W(-t e^{-t})/ln(gamma) with
  // t = ln(gamma) phi / (gamma - phi). The argument sits in [-1/e, 0), where
  // both real branches exist; report the one matching the bisection root.
  const double ln_gamma = std::log(gamma);
  const double t = ln_gamma * phi / (gamma - phi);
  const double arg = -t * std::exp(-t);
  const double base = -phi / (gamma - phi);
  const double via_w0 = base - lambert_w0(arg) / ln_gamma;
  const double via_wm1 = base - lambert_w_m1(arg) / ln_gamma;
  if (std::abs(via_w0 - cls.alpha_low) <= std::abs(via_wm1 - cls.alpha_low)) {
    cls.alpha_low_lambert = via_w0;
    cls.lambert_branch = "W0";
  } else {
    cls.alpha_low_lambert = via_wm1;
    cls.lambert_branch = "W-1";
  }
  cls.lambert_discrepancy = std::abs(cls.alpha_low_lambert - cls.alpha_low);
  return cls;
}

// Utilization at which Psi_alpha reaches U: z_u = T (1 + ln(gamma)/alpha).
inline double okp_saturation_utilization(const DensityBounds& bounds, double alpha) {
  return std::min(1.0, bounds.T() * (1.0 + std::log(bounds.gamma()) / alpha));
}

// Two-batch worst-case instance. Batch 1 traces Psi_alpha with per-item
// weight weight_cap; batch 2 carries total weight 1 at density U - epsilon
// (alpha >= 1) or U (alpha < 1).
inline OkpInstance okp_worst_case(const DensityBounds& bounds, double alpha,
                                  double weight_cap, double epsilon) {
  if (!(alpha > 0.0)) throw std::invalid_argument("okp_worst_case: alpha must be > 0");
  if (!(weight_cap > 0.0) || weight_cap > 1e-2)
    throw std::invalid_argument("okp_worst_case: weight_cap must be in (0, 1e-2]");
  if (!(epsilon > 0.0) || epsilon >= bounds.U - bounds.L)
    throw std::invalid_argument("okp_worst_case: epsilon must be in (0, U-L)");

  OkpInstance inst;
  inst.bounds = bounds;
  inst.weight_cap = weight_cap;
  ThresholdCurve curve(bounds, alpha);

  const double batch1_weight =
      alpha >= 1.0 ? okp_saturation_utilization(bounds, alpha) : 1.0;
  double z = 0.0;
  while (z < batch1_weight - kTol) {
    const double w = std::min(weight_cap, batch1_weight - z);
    // Density pinned to the marginal cost at the utilization just before the
    // item, clipped into the admissible band.
    double d = psi(curve, std::min(z, 1.0 - weight_cap * 0.5));
    d = std::min(std::max(d, bounds.L), bounds.U);
    inst.items.push_back({d * w, w});
    z += w;
  }

  const double batch2_density = alpha >= 1.0 ? bounds.U - epsilon : bounds.U;
  double remaining = 1.0;
  while (remaining > kTol) {
    const double w = std::min(weight_cap, remaining);
    inst.items.push_back({batch2_density * w, w});
    remaining -= w;
  }
  return inst;
}

}  // namespace compols
