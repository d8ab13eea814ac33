#pragma once

// Ski-rental policy class A(b): rent b days, buy on day b+1.
// Degradation factor is taken against the break-even baseline A(p).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "compols/core.hpp"

namespace compols {

struct SkiProblem {
  int p = 2;  // purchase price, integer > 1
  int b = 1;  // rent-days parameter, integer >= 1

  SkiProblem(int price, int rent_days) : p(price), b(rent_days) {
    if (p < 2) throw std::invalid_argument("SkiProblem: p must be >= 2");
    if (b < 1) throw std::invalid_argument("SkiProblem: b must be >= 1");
  }
};

// Cost of A(b) and the offline optimum for x skiing days.
inline std::pair<double, double> ski_cost(const SkiProblem& prob, int x) {
  if (x < 1) throw std::invalid_argument("ski_cost: x must be >= 1");
  const double alg = (x <= prob.b) ? static_cast<double>(x)
                                   : static_cast<double>(prob.b + prob.p);
  const double opt = static_cast<double>(std::min(x, prob.p));
  return {alg, opt};
}

// DF(A(b)) = 1/2 + max{p/2b, b/2p}.
inline double ski_df(int p, int b) {
  if (p < 2 || b < 1) throw std::invalid_argument("ski_df: need p >= 2, b >= 1");
  const double pd = p, bd = b;
  return 0.5 + std::max(pd / (2.0 * bd), bd / (2.0 * pd));
}

struct IntInterval {
  int lo = 0;
  int hi = 0;
  bool contains(int b) const { return lo <= b && b <= hi; }
};

// Integer sub-interval of [p/(2*phi-1), p*(2*phi-1)]; every b inside has
// DF(A(b)) <= phi. Endpoints are rounded inward to stay sound.
inline IntInterval ski_phi_class(int p, double phi) {
  if (p < 2) throw std::invalid_argument("ski_phi_class: p must be >= 2");
  if (phi < 1.0) throw std::invalid_argument("ski_phi_class: phi must be >= 1");
  const double s = 2.0 * phi - 1.0;
  int lo = static_cast<int>(std::ceil(p / s - kTol));
  int hi = static_cast<int>(std::floor(p * s + kTol));
  lo = std::max(lo, 1);
  if (lo > hi) throw std::logic_error("ski_phi_class: empty interval");
  return {lo, hi};
}

}  // namespace compols
