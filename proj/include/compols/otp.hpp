#pragma once

// One-way trading with the shared threshold curve: continuous selling up to
// the utilization where the marginal cost meets the offered rate, plus the
// piecewise closed form of the per-round reward as a function of alpha.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "compols/core.hpp"
#include "compols/okp.hpp"

namespace compols {

// Inverse of Psi_alpha on [L, U]: min{1, T(1 + ln(v/L)/alpha)}.
inline double inverse_threshold(const ThresholdCurve& curve, double v) {
  const double L = curve.bounds.L, U = curve.bounds.U;
  if (v < L - kTol || v > U + kTol)
    throw std::invalid_argument("inverse_threshold: rate outside [L, U]");
  v = std::clamp(v, L, U);
  const double T = curve.bounds.T();
  return std::min(1.0, T * (1.0 + std::log(v / L) / curve.alpha));
}

// Sell x = max{0, Phi_alpha(rate) - z}; returns (x, new z).
inline std::pair<double, double> otp_step(const ThresholdCurve& curve, double z,
                                          double rate) {
  if (z < -kTol || z > 1.0 + kTol)
    throw std::invalid_argument("otp_step: z outside [0, 1]");
  const double target = inverse_threshold(curve, rate);
  const double x = std::max(0.0, target - z);
  return {x, z + x};
}

// Total revenue of the online policy on the raw rate sequence.
inline double otp_simulate(const RateInstance& inst, double alpha) {
  ThresholdCurve curve(inst.bounds, alpha);
  double z = 0.0, reward = 0.0;
  for (double rate : inst.rates) {
    auto [x, z_next] = otp_step(curve, z, rate);
    reward += rate * x;
    z = z_next;
  }
  return reward;
}

// Strictly-increasing prefix-maximum subsequence; dropping dominated rates
// does not change the reward.
inline std::vector<double> increasing_rate_view(const std::vector<double>& rates) {
  std::vector<double> out;
  for (double r : rates)
    if (out.empty() || r > out.back()) out.push_back(r);
  return out;
}

enum class SegmentForm { kConstant, kAMinusBOverAlpha, kCPlusDOverAlpha };

struct RewardSegment {
  double alpha_lo = 0.0;  // exclusive
  double alpha_hi = 0.0;  // inclusive; +inf on the tail
  SegmentForm form = SegmentForm::kConstant;
  // kConstant: value = c0.
  // kAMinusBOverAlpha: value = c0 - c1/alpha.
  // kCPlusDOverAlpha:  value = c0 + c1/alpha.
  double c0 = 0.0;
  double c1 = 0.0;

  double eval(double alpha) const {
    switch (form) {
      case SegmentForm::kConstant:
        return c0;
      case SegmentForm::kAMinusBOverAlpha:
        return c0 - c1 / alpha;
      case SegmentForm::kCPlusDOverAlpha:
        return c0 + c1 / alpha;
    }
    return c0;
  }
};

struct RewardSegments {
  std::vector<RewardSegment> segments;  // partition (0, +inf) in order

  double eval(double alpha) const {
    for (const auto& seg : segments)
      if (alpha <= seg.alpha_hi) return seg.eval(alpha);
    return segments.back().eval(alpha);
  }
};

// Closed-form reward segments for a strictly increasing rate sequence.
inline RewardSegments otp_reward_segments(const RateInstance& inst) {
  const auto v = increasing_rate_view(inst.rates);
  if (v.empty()) throw std::invalid_argument("otp_reward_segments: empty instance");
  const double L = inst.bounds.L, U = inst.bounds.U, T = inst.bounds.T();
  const double ln_gamma = std::log(inst.bounds.gamma());
  for (double r : v)
    if (r < L - kTol || r > U + kTol)
      throw std::invalid_argument("otp_reward_segments: rate outside [L, U]");

  const std::size_t n = v.size();
  auto breakpoint = [&](double rate) { return std::log(rate / L) / ln_gamma; };

  RewardSegments out;
  // First segment: everything sold at the first rate.
  out.segments.push_back({0.0, breakpoint(v[0]), SegmentForm::kConstant, v[0], 0.0});

  // Interior segments: a_i - b_i/alpha.
  double b = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    b += T * (v[i] - v[i - 1]) * std::log(v[i - 1] / L);
    const double a = v[i] + (v[0] - v[i]) * T;
    out.segments.push_back(
        {breakpoint(v[i - 1]), breakpoint(v[i]), SegmentForm::kAMinusBOverAlpha, a, b});
  }

  // Tail segment: above the last breakpoint the inverse threshold no longer
  // saturates at any rate (including U itself), so reward = c + d/alpha with
  // c = v_1 T and d = T sum_i v_i ln(v_i / v_{i-1}), v_0 := L. This agrees
  // with the last interior form at the breakpoint.
  const double inf = std::numeric_limits<double>::infinity();
  double d = 0.0;
  double prev = L;
  for (std::size_t i = 0; i < n; ++i) {
    d += T * v[i] * std::log(v[i] / prev);
    prev = v[i];
  }
  out.segments.push_back(
      {breakpoint(v[n - 1]), inf, SegmentForm::kCPlusDOverAlpha, v[0] * T, d});
  return out;
}

inline double otp_reward_closed_form(const RateInstance& inst, double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("otp_reward_closed_form: alpha must be > 0");
  return otp_reward_segments(inst).eval(alpha);
}

// Lipschitz constant of the closed form on [alpha_lo, alpha_hi]: the largest
// derivative magnitude |c1|/alpha_lo^2 over segments meeting the interval.
inline double otp_lipschitz_bound(const RateInstance& inst, double alpha_lo,
                                  double alpha_hi) {
  if (!(alpha_lo > 0.0) || !(alpha_hi > alpha_lo))
    throw std::invalid_argument("otp_lipschitz_bound: need 0 < alpha_lo < alpha_hi");
  const auto segs = otp_reward_segments(inst);
  double bound = 0.0;
  for (const auto& seg : segs.segments) {
    if (seg.alpha_hi <= alpha_lo || seg.alpha_lo >= alpha_hi) continue;
    if (seg.form == SegmentForm::kConstant) continue;
    const double lo = std::max(seg.alpha_lo, alpha_lo);
    bound = std::max(bound, std::abs(seg.c1) / (lo * lo));
  }
  return bound;
}

}  // namespace compols
