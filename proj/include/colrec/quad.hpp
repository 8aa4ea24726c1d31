// Thin wrappers over GSL for the 1-D numerics the project needs: adaptive
// Gauss-Kronrod quadrature, Brent root finding and minimisation, plus an
// independent adaptive-Simpson rule used to cross-check every quadrature
// result at family-build time.
#pragma once

#include <functional>

namespace colrec {

using RealFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a,b]; rel_tol is honoured down to ~1e-12.
double integrate(const RealFn& f, double a, double b, double rel_tol = 1e-10);

// Adaptive quadrature on [a, +inf).
double integrate_to_inf(const RealFn& f, double a, double rel_tol = 1e-10);

// Second, independent rule (recursive Simpson) for cross-checks.
double integrate_simpson(const RealFn& f, double a, double b, double rel_tol = 1e-8,
                         int max_depth = 60);

// Brent root of f on [lo, hi]; requires a sign change.
double solve_brent(const RealFn& f, double lo, double hi, double rel_tol = 1e-12);

// Brent minimiser on [lo, hi] seeded at mid; returns argmin.
double minimize_brent(const RealFn& f, double lo, double mid, double hi,
                      double rel_tol = 1e-10);

// P(Pois(lambda) > d), the regularized upper tail.
double poisson_upper_tail(double lambda, long long d);

}  // namespace colrec
