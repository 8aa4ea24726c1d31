// RngStream: a splittable stream over the Philox counter space, plus the
// distribution samplers used across the project.
//
// Addressing scheme (128-bit counter + 64-bit key):
//   key  = master seed XOR a per-module tag
//   hi64 = stream path; sub(i) shifts the path left 32 bits and ORs i,
//          so up to two nesting levels of 32-bit indices are collision-free
//   lo64 = draw counter, with the top byte reserved for a purpose lane
//
// Every sampler consumes draws sequentially on its own stream; parallel code
// gives each unit of work its own sub-stream, which makes results independent
// of the worker count.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "colrec/philox.hpp"

namespace colrec {

class RngStream {
 public:
  RngStream() : key_(0), hi_(0) {}
  RngStream(uint64_t seed, uint64_t tag) : key_(seed ^ tag), hi_(0) {}

  // Child stream; valid for two nesting levels of 32-bit indices.
  RngStream sub(uint64_t i) const {
    RngStream s(*this);
    s.hi_ = (hi_ << 32) | (i & 0xFFFFFFFFu);
    s.lo_ = 0;
    s.buf_fill_ = 0;
    return s;
  }

  // Independent lane within the same stream (distinct draw-counter ranges).
  RngStream lane(uint8_t p) const {
    RngStream s(*this);
    s.lo_ = static_cast<uint64_t>(p) << 56;
    s.buf_fill_ = 0;
    return s;
  }

  uint64_t key() const { return key_; }
  uint64_t hi() const { return hi_; }
  uint64_t lo() const { return lo_; }

  uint64_t next_u64() {
    if (buf_fill_ == 0) {
      Philox4x32::block64(key_, hi_, lo_++, buf_);
      buf_fill_ = 2;
    }
    return buf_[--buf_fill_];
  }

  // Uniform on [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; used where log(u) must stay finite.
  double next_double_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  uint32_t next_below(uint32_t n) {
    // Unbiased bounded draw (Lemire-style rejection).
    uint64_t x = next_u64() & 0xFFFFFFFFull;
    uint64_t m = x * n;
    uint32_t l = static_cast<uint32_t>(m);
    if (l < n) {
      const uint32_t t = (-n) % n;
      while (l < t) {
        x = next_u64() & 0xFFFFFFFFull;
        m = x * n;
        l = static_cast<uint32_t>(m);
      }
    }
    return static_cast<uint32_t>(m >> 32);
  }

 private:
  uint64_t key_;
  uint64_t hi_;
  uint64_t lo_ = 0;
  uint64_t buf_[2] = {0, 0};
  int buf_fill_ = 0;
};

// Poisson sampler: inversion for small means, PTRD-style rejection above.
inline int64_t sample_poisson(double lambda, RngStream& rng) {
  if (lambda <= 0.0) return 0;
  if (lambda < 30.0) {
    // Multiplicative inversion.
    const double l = std::exp(-lambda);
    int64_t n = 0;
    double p = rng.next_double_pos();
    while (p > l) {
      p *= rng.next_double_pos();
      ++n;
    }
    return n;
  }
  // Hörmann's PTRD transformed rejection.
  const double smu = std::sqrt(lambda);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.next_double() - 0.5;
    const double v = rng.next_double_pos();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lognorm =
        std::log(v * inv_alpha / (a / (us * us) + b));
    const double lhs = kf * std::log(lambda) - lambda - std::lgamma(kf + 1.0);
    if (lognorm <= lhs) return static_cast<int64_t>(kf);
  }
}

// Binomial(n, p) by Bernoulli counting; fine for the tree-scale n used here.
inline int64_t sample_binomial(int64_t n, double p, RngStream& rng) {
  if (p <= 0.0 || n <= 0) return 0;
  if (p >= 1.0) return n;
  int64_t c = 0;
  for (int64_t i = 0; i < n; ++i)
    if (rng.next_double() < p) ++c;
  return c;
}

// Walker/Vose alias table over a finite discrete law. Sampling takes one u64.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(const std::vector<double>& weights) { build(weights); }

  void build(const std::vector<double>& weights) {
    const size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty weight vector");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    long double total = 0.0L;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("AliasTable: negative weight");
      total += w;
    }
    if (total <= 0.0L) throw std::invalid_argument("AliasTable: zero total mass");
    std::vector<double> scaled(n);
    for (size_t i = 0; i < n; ++i)
      scaled[i] = static_cast<double>(weights[i] * static_cast<long double>(n) / total);
    std::vector<uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (size_t i = 0; i < n; ++i)
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));
    while (!small.empty() && !large.empty()) {
      const uint32_t s = small.back();
      small.pop_back();
      const uint32_t g = large.back();
      prob_[s] = scaled[s];
      alias_[s] = g;
      scaled[g] = (scaled[g] + scaled[s]) - 1.0;
      if (scaled[g] < 1.0) {
        large.pop_back();
        small.push_back(g);
      }
    }
    for (uint32_t g : large) prob_[g] = 1.0;
    for (uint32_t s : small) prob_[s] = 1.0;
  }

  size_t size() const { return prob_.size(); }
  bool empty() const { return prob_.empty(); }

  uint32_t sample(RngStream& rng) const { return pick(rng.next_u64()); }

  uint32_t pick(uint64_t u) const {
    const size_t n = prob_.size();
    const uint32_t slot = static_cast<uint32_t>(((u >> 32) * n) >> 32);
    const double frac = static_cast<double>(u & 0xFFFFFFFFull) * 0x1.0p-32;
    return frac < prob_[slot] ? slot : alias_[slot];
  }

  const std::vector<double>& prob() const { return prob_; }
  const std::vector<uint32_t>& alias() const { return alias_; }

 private:
  std::vector<double> prob_;
  std::vector<uint32_t> alias_;
};

// Poisson with a fixed rate, prebuilt for tight loops: alias over the bulk of
// the pmf plus an escape outcome that walks the far tail sequentially.
class PoissonTable {
 public:
  PoissonTable() = default;

  explicit PoissonTable(double lambda) { build(lambda); }

  void build(double lambda) {
    lambda_ = lambda;
    if (lambda <= 0.0) {
      degenerate_zero_ = true;
      return;
    }
    degenerate_zero_ = false;
    const int64_t cap =
        static_cast<int64_t>(std::ceil(lambda + 40.0 * std::sqrt(lambda) + 30.0));
    cap_ = cap;
    std::vector<double> pmf(static_cast<size_t>(cap) + 2, 0.0);
    long double p = std::exp(-static_cast<long double>(lambda));
    long double cum = 0.0L;
    for (int64_t j = 0; j <= cap; ++j) {
      pmf[static_cast<size_t>(j)] = static_cast<double>(p);
      cum += p;
      p *= static_cast<long double>(lambda) / static_cast<long double>(j + 1);
    }
    const long double escape = cum >= 1.0L ? 0.0L : 1.0L - cum;
    pmf[static_cast<size_t>(cap) + 1] = static_cast<double>(escape);
    table_.build(pmf);
  }

  double lambda() const { return lambda_; }

  int64_t sample(RngStream& rng) const {
    if (degenerate_zero_) return 0;
    const uint32_t j = table_.sample(rng);
    if (static_cast<int64_t>(j) <= cap_) return j;
    return tail_walk(rng);
  }

  int64_t pick(uint64_t u, RngStream& rng) const {
    if (degenerate_zero_) return 0;
    const uint32_t j = table_.pick(u);
    if (static_cast<int64_t>(j) <= cap_) return j;
    return tail_walk(rng);
  }

 private:
  int64_t tail_walk(RngStream& rng) const {
    // Conditional sampling of Pois(lambda) given value > cap_. The escape mass
    // is ~1e-300 by construction, so this path is effectively never taken.
    int64_t j = cap_ + 1;
    long double term = 1.0L;
    long double total = 0.0L;
    std::vector<long double> terms;
    for (int64_t i = j;; ++i) {
      terms.push_back(term);
      total += term;
      const long double next = term * static_cast<long double>(lambda_) / (i + 1);
      if (next < total * 1e-25L && i > j + 4) break;
      term = next;
    }
    long double u = static_cast<long double>(rng.next_double()) * total;
    for (size_t i = 0; i < terms.size(); ++i) {
      u -= terms[i];
      if (u <= 0.0L) return j + static_cast<int64_t>(i);
    }
    return j + static_cast<int64_t>(terms.size()) - 1;
  }

  double lambda_ = 0.0;
  bool degenerate_zero_ = true;
  int64_t cap_ = 0;
  AliasTable table_;
};

}  // namespace colrec
