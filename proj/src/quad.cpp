#include "colrec/quad.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_roots.h>
#include <gsl/gsl_sf_gamma.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace colrec {

namespace {

struct GslInit {
  GslInit() { gsl_set_error_handler_off(); }
};
const GslInit gsl_init;

double fn_trampoline(double x, void* p) { return (*static_cast<const RealFn*>(p))(x); }

struct Workspace {
  gsl_integration_workspace* w;
  explicit Workspace(size_t n) : w(gsl_integration_workspace_alloc(n)) {}
  ~Workspace() { gsl_integration_workspace_free(w); }
};

}  // namespace

double integrate(const RealFn& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  Workspace ws(4096);
  gsl_function gf{fn_trampoline, const_cast<RealFn*>(&f)};
  double result = 0.0, abserr = 0.0;
  const int status = gsl_integration_qag(&gf, a, b, 0.0, rel_tol, 4096,
                                         GSL_INTEG_GAUSS31, ws.w, &result, &abserr);
  if (status != 0 && status != GSL_EROUND) {
    throw std::runtime_error("integrate: qag failed with status " + std::to_string(status));
  }
  return result;
}

double integrate_to_inf(const RealFn& f, double a, double rel_tol) {
  Workspace ws(4096);
  gsl_function gf{fn_trampoline, const_cast<RealFn*>(&f)};
  double result = 0.0, abserr = 0.0;
  const int status =
      gsl_integration_qagiu(&gf, a, 0.0, rel_tol, 4096, ws.w, &result, &abserr);
  if (status != 0 && status != GSL_EROUND) {
    throw std::runtime_error("integrate_to_inf: qagiu failed with status " +
                             std::to_string(status));
  }
  return result;
}

namespace {

double simpson_panel(const RealFn& f, double a, double fa, double b, double fb, double m,
                     double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const RealFn& f, double a, double fa, double b, double fb, double m,
                   double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_panel(f, a, fa, m, fm, lm, flm);
  const double right = simpson_panel(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_simpson(const RealFn& f, double a, double b, double rel_tol,
                         int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson_panel(f, a, fa, b, fb, m, fm);
  const double scale = std::fabs(whole) > 1e-300 ? std::fabs(whole) : 1.0;
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, rel_tol * scale, max_depth);
}

double solve_brent(const RealFn& f, double lo, double hi, double rel_tol) {
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("solve_brent: no sign change on bracket");
  }
  gsl_function gf{fn_trampoline, const_cast<RealFn*>(&f)};
  gsl_root_fsolver* s = gsl_root_fsolver_alloc(gsl_root_fsolver_brent);
  gsl_root_fsolver_set(s, &gf, lo, hi);
  double root = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    gsl_root_fsolver_iterate(s);
    root = gsl_root_fsolver_root(s);
    const double a = gsl_root_fsolver_x_lower(s);
    const double b = gsl_root_fsolver_x_upper(s);
    if (gsl_root_test_interval(a, b, 0.0, rel_tol) == GSL_SUCCESS) break;
  }
  gsl_root_fsolver_free(s);
  return root;
}

double minimize_brent(const RealFn& f, double lo, double mid, double hi, double rel_tol) {
  gsl_function gf{fn_trampoline, const_cast<RealFn*>(&f)};
  gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
  if (gsl_min_fminimizer_set(s, &gf, mid, lo, hi) != GSL_SUCCESS) {
    gsl_min_fminimizer_free(s);
    throw std::invalid_argument("minimize_brent: mid does not bracket a minimum");
  }
  double x = mid;
  for (int it = 0; it < 300; ++it) {
    gsl_min_fminimizer_iterate(s);
    x = gsl_min_fminimizer_x_minimum(s);
    const double a = gsl_min_fminimizer_x_lower(s);
    const double b = gsl_min_fminimizer_x_upper(s);
    if (gsl_min_test_interval(a, b, 0.0, rel_tol) == GSL_SUCCESS) break;
  }
  gsl_min_fminimizer_free(s);
  return x;
}

double poisson_upper_tail(double lambda, long long d) {
  if (lambda <= 0.0) return 0.0;
  if (d < 0) return 1.0;
  // P(Pois(lambda) <= d) = Q(d+1, lambda), so the strict upper tail is P(d+1, lambda).
  return gsl_sf_gamma_inc_P(static_cast<double>(d) + 1.0, lambda);
}

}  // namespace colrec
