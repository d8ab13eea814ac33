#pragma once

// Real branches of the Lambert W function via Halley iteration.
// W0 on [-1/e, inf), W-1 on [-1/e, 0).

#include <cmath>
#include <limits>
#include <stdexcept>

namespace compols {

namespace detail {

inline double lambert_halley(double x, double w) {
  for (int i = 0; i < 100; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (f == 0.0) break;  // exact hit (e.g. the branch point w = -1)
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    if (denom == 0.0 || !std::isfinite(denom)) break;
    const double step = f / denom;
    w -= step;
    if (std::abs(f) <= 1e-12 * (1.0 + std::abs(x)) && std::abs(step) <= 1e-14 * (1.0 + std::abs(w)))
      break;
  }
  return w;
}

}  // namespace detail

// Principal branch W0(x), x >= -1/e.
inline double lambert_w0(double x) {
  const double inv_e = std::exp(-1.0);
  if (x < -inv_e - 1e-12) throw std::invalid_argument("lambert_w0: x < -1/e");
  if (x < -inv_e) x = -inv_e;
  if (x == 0.0) return 0.0;
  double w;
  if (x < -0.25) {
    // Series around the branch point w = -1 + sqrt(2(ex+1)) - ...
    const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
    w = -1.0 + p - p * p / 3.0;
  } else if (x < 10.0) {
    w = x / (1.0 + x);  // crude but inside the basin
  } else {
    const double lx = std::log(x);
    w = lx - std::log(lx);
  }
  return detail::lambert_halley(x, w);
}

// Lower branch W-1(x), -1/e <= x < 0.
inline double lambert_w_m1(double x) {
  const double inv_e = std::exp(-1.0);
  if (x < -inv_e - 1e-12 || x >= 0.0)
    throw std::invalid_argument("lambert_w_m1: x must be in [-1/e, 0)");
  if (x < -inv_e) x = -inv_e;
  double w;
  if (x > -0.25) {
    const double lx = std::log(-x);
    w = lx - std::log(-lx);
  } else {
    const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
    w = -1.0 - p - p * p / 3.0;
  }
  return detail::lambert_halley(x, w);
}

}  // namespace compols
