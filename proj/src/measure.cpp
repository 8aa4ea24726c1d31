#include "colrec/measure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace colrec {

EmpiricalMeasure EmpiricalMeasure::from_points(std::vector<double> pts,
                                               std::vector<double> wts) {
  if (pts.size() != wts.size())
    throw std::invalid_argument("EmpiricalMeasure: size mismatch");
  const size_t n = pts.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return pts[a] < pts[b]; });
  EmpiricalMeasure m;
  m.pts_.reserve(n);
  m.wts_.reserve(n);
  for (size_t idx : order) {
    const double x = pts[idx], w = wts[idx];
    if (std::isnan(x)) throw std::invalid_argument("EmpiricalMeasure: NaN point");
    if (!(w >= 0.0)) throw std::invalid_argument("EmpiricalMeasure: negative weight");
    if (w == 0.0) continue;
    if (!m.pts_.empty() && m.pts_.back() == x) {
      m.wts_.back() += w;
    } else {
      m.pts_.push_back(x);
      m.wts_.push_back(w);
    }
  }
  m.rebuild_cum();
  return m;
}

EmpiricalMeasure EmpiricalMeasure::dirac(double x, double w) {
  return from_points({x}, {w});
}

EmpiricalMeasure EmpiricalMeasure::from_samples(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("EmpiricalMeasure: empty sample set");
  std::sort(xs.begin(), xs.end());
  const double w = 1.0 / static_cast<double>(xs.size());
  EmpiricalMeasure m;
  for (double x : xs) {
    if (std::isnan(x)) throw std::invalid_argument("EmpiricalMeasure: NaN sample");
    if (!m.pts_.empty() && m.pts_.back() == x) {
      m.wts_.back() += w;
    } else {
      m.pts_.push_back(x);
      m.wts_.push_back(w);
    }
  }
  m.rebuild_cum();
  return m;
}

void EmpiricalMeasure::rebuild_cum() {
  cum_.resize(pts_.size());
  double acc = 0.0;
  for (size_t i = 0; i < pts_.size(); ++i) {
    acc += wts_[i];
    cum_[i] = acc;
  }
  mass_ = acc;
}

double EmpiricalMeasure::cdf(double x) const {
  if (pts_.empty() || x < pts_.front()) return 0.0;
  const auto it = std::upper_bound(pts_.begin(), pts_.end(), x);
  return cum_[static_cast<size_t>(it - pts_.begin()) - 1];
}

double EmpiricalMeasure::cdf_left(double x) const {
  if (pts_.empty() || x <= pts_.front()) return 0.0;
  const auto it = std::lower_bound(pts_.begin(), pts_.end(), x);
  if (it == pts_.begin()) return 0.0;
  return cum_[static_cast<size_t>(it - pts_.begin()) - 1];
}

double EmpiricalMeasure::quantile(double u) const {
  if (pts_.empty()) throw std::logic_error("quantile of empty measure");
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile: u outside [0,1]");
  const double target = u * mass_;
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
  if (it == cum_.end()) return pts_.back();
  return pts_[static_cast<size_t>(it - cum_.begin())];
}

double EmpiricalMeasure::mean() const {
  double acc = 0.0;
  for (size_t i = 0; i < pts_.size(); ++i) acc += pts_[i] * wts_[i];
  return acc / mass_;
}

void EmpiricalMeasure::scale(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scale: factor must be positive");
  for (double& w : wts_) w *= c;
  rebuild_cum();
}

void EmpiricalMeasure::normalize() {
  if (mass_ <= 0.0) throw std::logic_error("normalize: zero mass");
  scale(1.0 / mass_);
}

void EmpiricalMeasure::to_csv(std::ostream& os, int k) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", mass_);
  os << "# colrec-measure mass=" << buf << " k=" << k << "\n";
  os << "point,weight\n";
  for (size_t i = 0; i < pts_.size(); ++i) {
    char pb[64], wb[64];
    std::snprintf(pb, sizeof pb, "%.17g", pts_[i]);
    std::snprintf(wb, sizeof wb, "%.17g", wts_[i]);
    os << pb << "," << wb << "\n";
  }
}

EmpiricalMeasure EmpiricalMeasure::from_csv(std::istream& is, int* k_out) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# colrec-measure", 0) != 0)
    throw std::runtime_error("from_csv: missing measure header");
  const auto kpos = line.find("k=");
  if (k_out && kpos != std::string::npos) *k_out = std::atoi(line.c_str() + kpos + 2);
  if (!std::getline(is, line)) throw std::runtime_error("from_csv: truncated");
  std::vector<double> pts, wts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("from_csv: bad row");
    pts.push_back(std::strtod(line.c_str(), nullptr));
    wts.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
  }
  return from_points(std::move(pts), std::move(wts));
}

namespace {

// Visits every merged support point with both normalized CDF values.
template <typename Fn>
void walk_merged(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, Fn&& fn) {
  const auto& a = mu.points();
  const auto& b = nu.points();
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
      x = a[i];
    else
      x = b[j];
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    fn(x, mu.cdf(x) / mu.mass(), nu.cdf(x) / nu.mass());
  }
}

}  // namespace

bool dominates(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double tol) {
  bool ok = true;
  walk_merged(mu, nu, [&](double, double fmu, double fnu) {
    if (fmu < fnu - tol) ok = false;
  });
  return ok;
}

bool dominates_by_eps(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double eps,
                      double tol) {
  bool ok = true;
  walk_merged(mu, nu, [&](double, double fmu, double fnu) {
    if (fmu >= 1.0 - tol) return;
    if (fnu <= tol) return;
    if (fmu - eps < fnu - tol) ok = false;
  });
  return ok;
}

double dominance_violation(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  double worst = 0.0;
  walk_merged(mu, nu, [&](double, double fmu, double fnu) {
    worst = std::max(worst, fnu - fmu);
  });
  return worst;
}

EmpiricalMeasure oplus(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                       size_t n_samples, RngStream& rng) {
  if (a.empty() || b.empty()) throw std::invalid_argument("oplus: empty operand");
  constexpr size_t kExactLimit = 1000;
  if (a.size() <= kExactLimit && b.size() <= kExactLimit) {
    std::vector<double> pts, wts;
    pts.reserve(a.size() * b.size());
    wts.reserve(a.size() * b.size());
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) {
        pts.push_back(a.points()[i] + b.points()[j]);
        wts.push_back(a.weights()[i] * b.weights()[j]);
      }
    return EmpiricalMeasure::from_points(std::move(pts), std::move(wts));
  }
  std::vector<double> xs(n_samples);
  for (size_t s = 0; s < n_samples; ++s)
    xs[s] = a.quantile(rng.next_double()) + b.quantile(rng.next_double());
  return EmpiricalMeasure::from_samples(std::move(xs));
}

EmpiricalMeasure otimes(const CountLaw& count, const EmpiricalMeasure& b, size_t n_samples,
                        RngStream& rng) {
  if (b.empty()) throw std::invalid_argument("otimes: empty operand");
  std::vector<double> xs(n_samples);
  for (size_t s = 0; s < n_samples; ++s) {
    const int64_t n = count.sample(rng);
    double acc = 0.0;  // empty sum convention
    for (int64_t i = 0; i < n; ++i) acc += b.quantile(rng.next_double());
    xs[s] = acc;
  }
  return EmpiricalMeasure::from_samples(std::move(xs));
}

CutResult cut_above(const EmpiricalMeasure& mu) {
  if (mu.mass() < 1.0 - 1e-12) throw std::invalid_argument("cut_above: mass < 1");
  if (mu.mass() <= 1.0 + 1e-12) return {mu, HUGE_VAL};
  std::vector<double> pts, wts;
  double acc = 0.0;
  for (size_t i = 0; i < mu.size(); ++i) {
    const double w = mu.weights()[i];
    if (acc + w >= 1.0) {
      pts.push_back(mu.points()[i]);
      wts.push_back(1.0 - acc);
      return {EmpiricalMeasure::from_points(std::move(pts), std::move(wts)),
              mu.points()[i]};
    }
    pts.push_back(mu.points()[i]);
    wts.push_back(w);
    acc += w;
  }
  return {EmpiricalMeasure::from_points(std::move(pts), std::move(wts)), HUGE_VAL};
}

CutResult cut_below(const EmpiricalMeasure& mu) {
  if (mu.mass() < 1.0 - 1e-12) throw std::invalid_argument("cut_below: mass < 1");
  if (mu.mass() <= 1.0 + 1e-12) return {mu, -HUGE_VAL};
  std::vector<double> pts, wts;
  double acc = 0.0;
  for (size_t i = mu.size(); i-- > 0;) {
    const double w = mu.weights()[i];
    if (acc + w >= 1.0) {
      pts.push_back(mu.points()[i]);
      wts.push_back(1.0 - acc);
      std::reverse(pts.begin(), pts.end());
      std::reverse(wts.begin(), wts.end());
      return {EmpiricalMeasure::from_points(std::move(pts), std::move(wts)),
              mu.points()[i]};
    }
    pts.push_back(mu.points()[i]);
    wts.push_back(w);
    acc += w;
  }
  std::reverse(pts.begin(), pts.end());
  std::reverse(wts.begin(), wts.end());
  return {EmpiricalMeasure::from_points(std::move(pts), std::move(wts)), -HUGE_VAL};
}

QuantileReduction quantile_reduce(const EmpiricalMeasure& mu1, const EmpiricalMeasure& mu2,
                                  bool envelope) {
  if (mu1.empty() || mu2.empty()) throw std::invalid_argument("quantile_reduce: empty");
  QuantileReduction q;
  q.pts1_ = mu1.points();
  q.cum1_.resize(q.pts1_.size());
  q.pts2_ = mu2.points();
  q.cum2_.resize(q.pts2_.size());
  for (size_t i = 0; i < q.pts2_.size(); ++i) q.cum2_[i] = mu2.cdf(q.pts2_[i]) / mu2.mass();
  double worst = 0.0;
  for (size_t i = 0; i < q.pts1_.size(); ++i) {
    const double f1 = mu1.cdf(q.pts1_[i]) / mu1.mass();
    const double f2 = mu2.cdf(q.pts1_[i]) / mu2.mass();
    worst = std::max(worst, f1 - f2);
    q.cum1_[i] = envelope ? std::min(f1, f2) : f1;
  }
  q.envelope_gap_ = worst;
  if (!envelope && worst > 1e-12)
    throw std::invalid_argument("quantile_reduce: mu1 does not dominate mu2");
  q.floor_ = mu2.min_point();
  return q;
}

double QuantileReduction::operator()(double y, double u) const {
  // target = G1(y-0) + u (G1(y) - G1(y-0)), then the smallest x with
  // G2(x) >= target. Constant stretches of G1 make u irrelevant there.
  const auto it = std::upper_bound(pts1_.begin(), pts1_.end(), y);
  const size_t idx = static_cast<size_t>(it - pts1_.begin());
  const double g_right = idx == 0 ? 0.0 : cum1_[idx - 1];
  double g_left = g_right;
  if (idx > 0 && pts1_[idx - 1] == y) g_left = idx >= 2 ? cum1_[idx - 2] : 0.0;
  const double target = g_left + u * (g_right - g_left);
  const auto it2 = std::lower_bound(cum2_.begin(), cum2_.end(), target);
  if (it2 == cum2_.end()) return pts2_.back();
  const double x = pts2_[static_cast<size_t>(it2 - cum2_.begin())];
  return x;
}

double ks_distance_sorted(const std::vector<double>& sorted,
                          const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double lo = f - static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n - f;
    worst = std::max(worst, std::max(lo, hi));
  }
  return worst;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::fabs(static_cast<double>(i) / na -
                                      static_cast<double>(j) / nb));
  }
  return worst;
}

StarMeasure::StarMeasure(EmpiricalMeasure m, int k) : m_(std::move(m)), k_(k) {
  if (k < 2) throw std::invalid_argument("StarMeasure: k < 2");
  if (std::fabs(m_.mass() - 1.0) > 1e-9)
    throw std::invalid_argument("StarMeasure: mass must be 1");
  const double lo = 1.0 / static_cast<double>(k);
  if (m_.min_point() < lo - 1e-12 || m_.max_point() > 1.0 + 1e-12)
    throw std::invalid_argument("StarMeasure: support outside [1/k, 1]");
}

}  // namespace colrec
