// The phi transform between belief space [0,1] and the extended real line,
// plus the mixing-weight algebra used by the manipulated recursion.
//
//   phi(x) = log[(1 - (1-x)/(k-1)) / (1-x)] = log1p((k x - 1)/((k-1)(1-x)))
//
// phi is increasing, phi(1/k) = 0, phi(1) = +inf. The log1p form keeps the
// fixed point at x = 1/k numerically exact.
#pragma once

#include <cmath>
#include <stdexcept>

namespace colrec {

inline double phi(double x, int k) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("phi: x outside [0,1]");
  if (x == 1.0) return HUGE_VAL;
  const double num = std::fma(static_cast<double>(k), x, -1.0);
  const double den = static_cast<double>(k - 1) * (1.0 - x);
  return std::log1p(num / den);
}

inline double phi_floor(int k) { return phi(0.0, k); }  // log((k-2)/(k-1)) < 0

inline double phi_inv(double y, int k) {
  if (std::isnan(y)) throw std::domain_error("phi_inv: nan");
  if (y == HUGE_VAL) return 1.0;
  if (y < phi_floor(k) - 1e-12) throw std::domain_error("phi_inv: y below phi(0)");
  const double t = std::exp(y) + 1.0 / static_cast<double>(k - 1);
  double x = 1.0 - 1.0 / t;
  if (x < 0.0) x = 0.0;
  return x;
}

// Mixing weight: the t in (1-t) y + t/k = q. By convention t = 0 at y = 1/k,
// where the formula is 0/0 (q <= y and the support floor force q = y there).
inline double mix_weight(double q, double y, int k) {
  if (!(y <= 1.0 + 1e-12)) throw std::domain_error("mix_weight: y > 1");
  const double den = std::fma(static_cast<double>(k), y, -1.0);
  if (den <= 1e-14) {
    if (y < 1.0 / static_cast<double>(k) - 1e-9)
      throw std::domain_error("mix_weight: y below 1/k");
    return 0.0;
  }
  double t = (static_cast<double>(k) * (y - q)) / den;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  return t;
}

}  // namespace colrec
