// Weighted-atom measures on the extended reals: CDF/quantile algebra,
// convolutions, cuts, stochastic dominance, and the quantile coupling that
// reduces a dominating law onto a dominated one.
//
// Atoms at +-inf are ordinary support points; densities never appear here --
// continuous laws enter the project through inverse-CDF samplers elsewhere.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "colrec/rng.hpp"

namespace colrec {

class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;

  // Sorts, merges duplicate points, drops zero weights. Throws on negative
  // weights or NaN points.
  static EmpiricalMeasure from_points(std::vector<double> pts, std::vector<double> wts);
  static EmpiricalMeasure dirac(double x, double w = 1.0);
  // Equal-weight empirical law of a sample vector (need not be sorted).
  static EmpiricalMeasure from_samples(std::vector<double> xs);

  size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  double mass() const { return mass_; }
  const std::vector<double>& points() const { return pts_; }
  const std::vector<double>& weights() const { return wts_; }
  double min_point() const { return pts_.front(); }
  double max_point() const { return pts_.back(); }

  double cdf(double x) const;       // mass of (-inf, x]
  double cdf_left(double x) const;  // mass of (-inf, x)
  // Generalized inverse of the normalized CDF: inf{x : F(x) >= u}, u in [0,1].
  double quantile(double u) const;

  double mean() const;

  void scale(double c);
  void normalize();

  // CSV with a header line carrying mass and k ("k" is caller context, -1 if
  // not meaningful).
  void to_csv(std::ostream& os, int k = -1) const;
  static EmpiricalMeasure from_csv(std::istream& is, int* k_out = nullptr);

 private:
  void rebuild_cum();
  std::vector<double> pts_;
  std::vector<double> wts_;
  std::vector<double> cum_;
  double mass_ = 0.0;
};

// mu <= nu in CDF order: F_mu(x) >= F_nu(x) at every merged support point,
// i.e. "nu stochastically dominates mu". Violations up to tol are ignored.
bool dominates(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double tol = 1e-12);

// Dominance by eps: at every merged support point, F_mu(x) = 1 or
// F_nu(x) = 0 or F_mu(x) - eps >= F_nu(x).
bool dominates_by_eps(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double eps,
                      double tol = 1e-12);

// Largest one-sided CDF violation sup_x (F_nu(x) - F_mu(x))^+ over merged
// support points; 0 means mu <= nu holds exactly.
double dominance_violation(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Sum of independent draws. Exact convolution when |a|*|b| stays small
// (both supports <= 1000 points); Monte Carlo with n_samples draws otherwise.
EmpiricalMeasure oplus(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                       size_t n_samples, RngStream& rng);

struct CountLaw {
  enum class Kind { Deterministic, Poisson } kind = Kind::Deterministic;
  double value = 0.0;  // count or mean
  static CountLaw fixed(int64_t n) { return {Kind::Deterministic, static_cast<double>(n)}; }
  static CountLaw poisson(double mean) { return {Kind::Poisson, mean}; }
  int64_t sample(RngStream& rng) const {
    return kind == Kind::Deterministic ? static_cast<int64_t>(value)
                                       : sample_poisson(value, rng);
  }
};

// Compound sum of `count` i.i.d. draws of b (empty sum = 0), Monte Carlo.
EmpiricalMeasure otimes(const CountLaw& count, const EmpiricalMeasure& b, size_t n_samples,
                        RngStream& rng);

// Keep all mass below (resp. above) a threshold so exactly mass 1 remains; an
// atom straddling the threshold is split. Requires mass >= 1. Returns the cut
// measure and the threshold (+inf / -inf when the measure already has mass 1).
struct CutResult {
  EmpiricalMeasure measure;
  double threshold;
};
CutResult cut_above(const EmpiricalMeasure& mu);
CutResult cut_below(const EmpiricalMeasure& mu);

// Quantile coupling q(y,u) pushing mu1 onto mu2 with q(y,u) <= y; requires
// mu2 <= mu1 (mu1 dominates). With `envelope`, mu1's CDF is first raised to
// min(F1, F2) so the coupling is exact even when empirical noise leaves
// isolated dominance violations; envelope_gap() reports how much was raised.
class QuantileReduction {
 public:
  QuantileReduction() = default;
  double operator()(double y, double u) const;
  double envelope_gap() const { return envelope_gap_; }
  friend QuantileReduction quantile_reduce(const EmpiricalMeasure& mu1,
                                           const EmpiricalMeasure& mu2, bool envelope);

 private:
  std::vector<double> pts1_, cum1_;
  std::vector<double> pts2_, cum2_;
  double floor_ = -HUGE_VAL;
  double envelope_gap_ = 0.0;
};

QuantileReduction quantile_reduce(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                                  bool envelope = false);

// One-sample KS distance of sorted samples against an arbitrary CDF.
double ks_distance_sorted(const std::vector<double>& sorted, const std::function<double(double)>& cdf);
// Two-sample KS distance (inputs need not be sorted).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// A probability measure on [1/k, 1], identified with the symmetric measure on
// the star set via value + uniform argmax colour.
class StarMeasure {
 public:
  StarMeasure() = default;
  StarMeasure(EmpiricalMeasure m, int k);
  const EmpiricalMeasure& measure() const { return m_; }
  int k() const { return k_; }
  static StarMeasure dirac_uniform(int k) {
    return StarMeasure(EmpiricalMeasure::dirac(1.0 / static_cast<double>(k)), k);
  }
  static StarMeasure dirac_frozen(int k) {
    return StarMeasure(EmpiricalMeasure::dirac(1.0), k);
  }

 private:
  EmpiricalMeasure m_;
  int k_ = 0;
};

}  // namespace colrec
