#include "colrec/popdyn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "colrec/kernels.hpp"
#include "colrec/par.hpp"
#include "colrec/phi.hpp"

namespace colrec {

TiltSplit tilt_split(const StarMeasure& pop) {
  const auto& m = pop.measure();
  std::vector<double> pe, we, pn, wn;
  double neq_mass = 0.0;
  for (size_t i = 0; i < m.size(); ++i) {
    const double x = m.points()[i], w = m.weights()[i];
    if (x > 0.0) {
      pe.push_back(x);
      we.push_back(w * x);
    }
    const double wn_i = w * (1.0 - x);
    if (wn_i > 0.0) {
      pn.push_back(x);
      wn.push_back(wn_i);
    }
    neq_mass += wn_i;
  }
  TiltSplit out;
  out.p_neq = neq_mass / m.mass();
  if (!we.empty()) {
    out.mu_eq = EmpiricalMeasure::from_points(std::move(pe), std::move(we));
    out.mu_eq.normalize();
  }
  if (!wn.empty()) {
    out.mu_neq = EmpiricalMeasure::from_points(std::move(pn), std::move(wn));
    out.mu_neq.normalize();
  }
  return out;
}

int64_t ArrivalCounts::total() const {
  int64_t t = c1_neq;
  for (int64_t c : c_eq) t += c;
  for (int64_t c : c_neq) t += c;
  return t;
}

ArrivalCounts sample_arrivals(const OffspringLaw& law, int k, double p_neq,
                              RngStream& rng) {
  if (k < 3) throw std::invalid_argument("sample_arrivals: k < 3");
  ArrivalCounts out;
  out.c_eq.assign(static_cast<size_t>(k - 1), 0);
  out.c_neq.assign(static_cast<size_t>(k - 1), 0);
  if (law.kind == OffspringLaw::Kind::Poisson) {
    const double D = law.mean / static_cast<double>(k - 1);
    out.c1_neq = sample_poisson(p_neq * D, rng);
    const double r_eq = (1.0 - p_neq) * D;
    const double r_neq = p_neq * D * static_cast<double>(k - 2) / static_cast<double>(k - 1);
    for (int m = 0; m < k - 1; ++m) {
      out.c_eq[static_cast<size_t>(m)] = sample_poisson(r_eq, rng);
      out.c_neq[static_cast<size_t>(m)] = sample_poisson(r_neq, rng);
    }
    return out;
  }
  // Multinomial split of the total degree per the colour-class cell law.
  const int64_t d_total = sample_offspring(law, rng);
  const uint32_t km1 = static_cast<uint32_t>(k - 1);
  for (int64_t t = 0; t < d_total; ++t) {
    if (rng.next_double() < p_neq) {
      const uint32_t r = rng.next_below(km1 * km1);
      if (r < km1) {
        ++out.c1_neq;
      } else {
        ++out.c_neq[(r - km1) / static_cast<uint32_t>(k - 2)];
      }
    } else {
      ++out.c_eq[rng.next_below(km1)];
    }
  }
  return out;
}

double PhiMixtureSpec::total_mass() const {
  double t = zero_mass + tail_mass;
  for (double w : atom_w) t += w;
  return t;
}

std::vector<double> build_quantile_table(const std::function<double(double)>& density,
                                         double lo, double hi, size_t size) {
  if (!(hi > lo)) throw std::invalid_argument("build_quantile_table: empty range");
  if (size < 2) throw std::invalid_argument("build_quantile_table: size < 2");
  // Cumulative mass over fine panels (Simpson per panel), then per-panel
  // inversion against a linear density model.
  const size_t panels = std::max<size_t>(4 * size, 4096);
  const double h = (hi - lo) / static_cast<double>(panels);
  std::vector<double> f(panels + 1);
  for (size_t i = 0; i <= panels; ++i) f[i] = density(lo + h * static_cast<double>(i));
  std::vector<double> cum(panels + 1, 0.0);
  for (size_t i = 0; i < panels; ++i) {
    const double mid = density(lo + h * (static_cast<double>(i) + 0.5));
    cum[i + 1] = cum[i] + h / 6.0 * (f[i] + 4.0 * mid + f[i + 1]);
  }
  const double total = cum[panels];
  if (!(total > 0.0)) throw std::invalid_argument("build_quantile_table: zero mass");
  std::vector<double> q(size);
  size_t panel = 0;
  for (size_t j = 0; j < size; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(size - 1);
    while (panel + 1 < panels && cum[panel + 1] < target) ++panel;
    const double seg = cum[panel + 1] - cum[panel];
    double t = seg > 0.0 ? (target - cum[panel]) / seg : 0.0;
    // Refine against the trapezoid (linear-density) model of the panel:
    // A s^2 + B s - t/2 = 0 with A = (fb-fa)/(2(fa+fb)), B = fa/(fa+fb).
    const double fa = f[panel], fb = f[panel + 1];
    if (fa + fb > 0.0 && std::fabs(fb - fa) > 1e-12 * (fa + fb)) {
      const double A = 0.5 * (fb - fa) / (fa + fb);
      const double B = fa / (fa + fb);
      const double disc = B * B + 2.0 * A * t;
      if (disc >= 0.0 && std::fabs(A) > 1e-30) {
        const double s = (-B + std::sqrt(disc)) / (2.0 * A);
        if (s >= 0.0 && s <= 1.0) t = s;
      }
    }
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    q[j] = lo + h * (static_cast<double>(panel) + t);
  }
  q[0] = lo;
  q[size - 1] = hi;
  for (size_t j = 1; j < size; ++j)
    if (q[j] < q[j - 1]) throw std::logic_error("build_quantile_table: non-monotone");
  return q;
}

double table_sample(const std::vector<double>& table, double u) {
  const double pos = u * static_cast<double>(table.size() - 1);
  size_t j = static_cast<size_t>(pos);
  if (j > table.size() - 2) j = table.size() - 2;
  const double frac = pos - static_cast<double>(j);
  return std::fma(frac, table[j + 1] - table[j], table[j]);
}

// ---- ReducedStepSampler ------------------------------------------------------

double ReducedStepSampler::Channel::sample_value(RngStream& rng) const {
  const double u = rng.next_double();
  if (u < p_single) return single_phi;
  if (u < p_single + p_tail) return table_sample(tail, rng.next_double());
  return atom_phi[atoms.sample(rng)];
}

void ReducedStepSampler::Channel::finalize() {
  pois_all.build(rate_nonzero);
  pois_atom.build(rate_nonzero * p_single);
  pois_tail.build(rate_nonzero * p_tail);
  batchable = atom_phi.empty();
}

ReducedStepSampler::Channel ReducedStepSampler::combine(double rate_a,
                                                        const PhiMixtureSpec& a,
                                                        double rate_b,
                                                        const PhiMixtureSpec& b) {
  if (!a.tail_table.empty() && !b.tail_table.empty())
    throw std::logic_error("combine: merge tails before compiling a channel");
  Channel ch;
  std::map<double, double> atom_mass;
  double tail_rate = 0.0;
  const std::vector<double>* tail = nullptr;
  auto add = [&](double rate, const PhiMixtureSpec& s) {
    if (rate <= 0.0) return;
    for (size_t i = 0; i < s.atom_phi.size(); ++i)
      atom_mass[s.atom_phi[i]] += rate * s.atom_w[i];
    if (!s.tail_table.empty() && s.tail_mass > 0.0) {
      tail_rate += rate * s.tail_mass;
      tail = &s.tail_table;
    }
  };
  add(rate_a, a);
  add(rate_b, b);
  double atom_rate = 0.0;
  for (const auto& [p, w] : atom_mass) atom_rate += w;
  ch.rate_nonzero = atom_rate + tail_rate;
  if (ch.rate_nonzero <= 0.0) {
    ch.finalize();
    return ch;
  }
  if (tail != nullptr) {
    ch.tail = *tail;
    ch.p_tail = tail_rate / ch.rate_nonzero;
  }
  if (atom_mass.size() == 1) {
    ch.has_single = true;
    ch.single_phi = atom_mass.begin()->first;
    ch.p_single = atom_mass.begin()->second / ch.rate_nonzero;
  } else if (!atom_mass.empty()) {
    std::vector<double> ws;
    for (const auto& [p, w] : atom_mass) {
      ch.atom_phi.push_back(p);
      ws.push_back(w);
    }
    ch.atoms.build(ws);
  }
  ch.finalize();
  return ch;
}

ReducedStepSampler::ReducedStepSampler(const StarMeasure& pop, const OffspringLaw& law)
    : k_(pop.k()), law_(law) {
  d_ = law.effective_mean();
  const TiltSplit ts = tilt_split(pop);
  p_neq_ = ts.p_neq;
  auto to_spec = [&](const EmpiricalMeasure& m) {
    PhiMixtureSpec s;
    for (size_t i = 0; i < m.size(); ++i) {
      const double y = phi(std::min(std::max(m.points()[i], 0.0), 1.0), k_);
      const double w = m.weights()[i];
      if (y == 0.0) {
        s.zero_mass += w;
      } else {
        s.atom_phi.push_back(y);
        s.atom_w.push_back(w);
      }
    }
    return s;
  };
  if (!ts.mu_eq.empty()) eq_spec_ = to_spec(ts.mu_eq);
  if (!ts.mu_neq.empty()) neq_spec_ = to_spec(ts.mu_neq);
  const double D = d_ / static_cast<double>(k_ - 1);
  const double r1 = p_neq_ * D;
  const double r2_eq = (1.0 - p_neq_) * D;
  const double r2_neq = p_neq_ * D * static_cast<double>(k_ - 2) / static_cast<double>(k_ - 1);
  ch1_ = combine(r1, neq_spec_, 0.0, {});
  ch2_ = combine(r2_eq, eq_spec_, r2_neq, neq_spec_);
  poisson_path_ = law.kind == OffspringLaw::Kind::Poisson;
  if (!poisson_path_) {
    auto outcome_alias = [](const PhiMixtureSpec& s) {
      std::vector<double> w;
      w.push_back(s.zero_mass);
      for (double aw : s.atom_w) w.push_back(aw);
      w.push_back(s.tail_mass);
      double t = 0.0;
      for (double x : w) t += x;
      if (t <= 0.0) w[0] = 1.0;  // degenerate, never sampled
      return AliasTable(w);
    };
    eq_outcomes_ = outcome_alias(eq_spec_);
    neq_outcomes_ = outcome_alias(neq_spec_);
  }
}

ReducedStepSampler::ReducedStepSampler(int k, double d, double rate1, PhiMixtureSpec mix1,
                                       double rate2, PhiMixtureSpec mix2)
    : k_(k), d_(d), poisson_path_(true) {
  law_ = OffspringLaw::poisson(d);
  eq_spec_ = mix2;
  neq_spec_ = mix1;
  p_neq_ = 0.0;  // not meaningful for pre-combined channels
  ch1_ = combine(rate1, mix1, 0.0, {});
  ch2_ = combine(rate2, mix2, 0.0, {});
}

void ReducedStepSampler::sample_scalar_channel(const Channel& ch, RngStream& rng,
                                               double& z_acc) const {
  const int64_t n = ch.pois_all.sample(rng);
  for (int64_t i = 0; i < n; ++i) z_acc += ch.sample_value(rng);
}

ReducedStepSampler::Draw ReducedStepSampler::assemble(double z1, std::vector<double>& z,
                                                      bool any_arrival) const {
  if (!any_arrival) return {1.0 / static_cast<double>(k_), 0.0};
  const auto& K = kernels();
  const size_t m = z.size();
  const double z2min = K.min_val(z.data(), m);
  const double s2 = K.exp_shift_sum(z.data(), m, z1);
  const double x0 = 1.0 / (1.0 + s2);
  double w = phi(x0, k_);
  if (!(w > 0.0)) w = 0.0;
  double x_new;
  if (z1 <= z2min) {
    x_new = x0;
  } else {
    const double sb = K.exp_shift_sum(z.data(), m, z2min) + xexp(z2min - z1);
    x_new = 1.0 / sb;
  }
  return {x_new, w};
}

ReducedStepSampler::Draw ReducedStepSampler::sample(RngStream rng, Workspace& ws) const {
  const size_t m = static_cast<size_t>(k_ - 1);
  ws.z.assign(m, 0.0);
  bool any = false;
  double z1 = 0.0;

  if (poisson_path_) {
    RngStream ch1_rng = rng.lane(2);
    const int64_t n1 = ch1_.pois_all.sample(ch1_rng);
    for (int64_t i = 0; i < n1; ++i) z1 += ch1_.sample_value(ch1_rng);
    any = any || n1 > 0;

    if (ch2_.batchable && k_ >= 256) {
      const auto& K = kernels();
      RngStream escape = rng.lane(3);
      ws.u64s.resize(2 * m);
      K.fill_u64(rng.key(), rng.lane(0).hi(), rng.lane(0).lo(), ws.u64s.data(), 2 * m);
      ws.n_atom.resize(m);
      ws.n_tail.resize(m);
      size_t total_tail = 0;
      for (size_t i = 0; i < m; ++i) {
        const int32_t na =
            ch2_.has_single ? static_cast<int32_t>(ch2_.pois_atom.pick(ws.u64s[i], escape))
                            : 0;
        const int32_t nt =
            ch2_.p_tail > 0.0
                ? static_cast<int32_t>(ch2_.pois_tail.pick(ws.u64s[m + i], escape))
                : 0;
        ws.n_atom[i] = na;
        ws.n_tail[i] = nt;
        total_tail += static_cast<size_t>(nt);
        if (na > 0) ws.z[i] = ch2_.single_phi * static_cast<double>(na);
        any = any || na > 0 || nt > 0;
      }
      if (total_tail > 0) {
        ws.uvals.resize(total_tail);
        ws.vals.resize(total_tail);
        K.fill_uniform(rng.key(), rng.lane(1).hi(), rng.lane(1).lo(), ws.uvals.data(),
                       total_tail);
        K.gather_lerp(ch2_.tail.data(), ch2_.tail.size(), ws.uvals.data(), ws.vals.data(),
                      total_tail);
        size_t idx = 0;
        for (size_t i = 0; i < m; ++i) {
          double acc = ws.z[i];
          for (int32_t j = 0; j < ws.n_tail[i]; ++j) acc += ws.vals[idx++];
          ws.z[i] = acc;
        }
      }
    } else {
      RngStream ch2_rng = rng.lane(0);
      for (size_t i = 0; i < m; ++i) {
        const int64_t n = ch2_.pois_all.sample(ch2_rng);
        double acc = 0.0;
        for (int64_t j = 0; j < n; ++j) acc += ch2_.sample_value(ch2_rng);
        ws.z[i] = acc;
        any = any || n > 0;
      }
    }
    return assemble(z1, ws.z, any);
  }

  // Multinomial path: total degree, then i.i.d. colour-class trials.
  RngStream seq = rng.lane(0);
  const int64_t d_total = sample_offspring(law_, seq);
  const uint32_t km1 = static_cast<uint32_t>(k_ - 1);
  auto draw_value = [&](const PhiMixtureSpec& s, const AliasTable& outcomes) -> double {
    const uint32_t o = outcomes.sample(seq);
    if (o == 0) return 0.0;
    if (o <= s.atom_phi.size()) return s.atom_phi[o - 1];
    return table_sample(s.tail_table, seq.next_double());
  };
  for (int64_t t = 0; t < d_total; ++t) {
    if (seq.next_double() < p_neq_) {
      const uint32_t r = seq.next_below(km1 * km1);
      const double v = draw_value(neq_spec_, neq_outcomes_);
      if (v == 0.0) continue;
      any = true;
      if (r < km1) {
        z1 += v;
      } else {
        ws.z[(r - km1) / static_cast<uint32_t>(k_ - 2)] += v;
      }
    } else {
      const uint32_t c = seq.next_below(km1);
      const double v = draw_value(eq_spec_, eq_outcomes_);
      if (v == 0.0) continue;
      any = true;
      ws.z[c] += v;
    }
  }
  return assemble(z1, ws.z, any);
}

ReducedStepSampler::Draw reduced_step_sample(const ReducedStepSampler& sampler,
                                             RngStream rng) {
  ReducedStepSampler::Workspace ws;
  return sampler.sample(rng, ws);
}

SimplexVector gamma_full_step(const StarMeasure& pop, const OffspringLaw& law,
                              RngStream& rng) {
  const int k = pop.k();
  if (k > 64) throw std::invalid_argument("gamma_full_step: k > 64 guard");
  const TiltSplit ts = tilt_split(pop);
  const int64_t d = sample_offspring(law, rng);
  std::vector<double> delta(static_cast<size_t>(k), 0.0);
  std::vector<uint8_t> zero(static_cast<size_t>(k), 0);
  for (int64_t child = 0; child < d; ++child) {
    const uint32_t l = 1 + rng.next_below(static_cast<uint32_t>(k - 1));
    const bool same = rng.next_double() >= ts.p_neq;
    double x;
    uint32_t a;
    if (same) {
      x = ts.mu_eq.quantile(rng.next_double());
      a = l;
    } else {
      x = ts.mu_neq.quantile(rng.next_double());
      a = rng.next_below(static_cast<uint32_t>(k - 1));
      if (a >= l) ++a;
    }
    // The common factor log1p(-(1-x)/(k-1)) over all coordinates cancels in
    // the normalization; only the argmax coordinate differs.
    const double off = (1.0 - x) / static_cast<double>(k - 1);
    if (x >= 1.0) {
      zero[a] = 1;
    } else {
      delta[a] += std::log1p(-x) - std::log1p(-off);
    }
  }
  double best = -HUGE_VAL;
  for (int l = 0; l < k; ++l)
    if (!zero[static_cast<size_t>(l)]) best = std::max(best, delta[static_cast<size_t>(l)]);
  SimplexVector out(static_cast<size_t>(k), 0.0);
  double denom = 0.0;
  for (int l = 0; l < k; ++l) {
    if (zero[static_cast<size_t>(l)]) continue;
    out[static_cast<size_t>(l)] = std::exp(delta[static_cast<size_t>(l)] - best);
    denom += out[static_cast<size_t>(l)];
  }
  for (double& v : out) v /= denom;
  return out;
}

double reconstruction_gap(const StarMeasure& pop) {
  return pop.measure().mean() - 1.0 / static_cast<double>(pop.k());
}

IterateResult iterate(const StarMeasure& pop0, const OffspringLaw& law, int n_steps,
                      size_t n_samples, uint64_t seed, unsigned workers,
                      size_t quantile_grid) {
  if (n_samples < 1000) throw std::invalid_argument("iterate: n_samples < 1000");
  IterateResult res;
  StarMeasure pop = pop0;
  const int k = pop0.k();
  std::vector<double> xs(n_steps > 0 ? n_samples : 0);
  for (int gen = 1; gen <= n_steps; ++gen) {
    const ReducedStepSampler sampler(pop, law);
    RngStream gen_stream = RngStream(seed, 0x706f7064796eull).sub(static_cast<uint64_t>(gen));
    parallel_for_indexed(n_samples, workers, [&](size_t i) {
      thread_local ReducedStepSampler::Workspace ws;
      xs[i] = sampler.sample(gen_stream.sub(i), ws).x_new;
    });
    EmpiricalMeasure em = EmpiricalMeasure::from_samples(xs);
    pop = StarMeasure(std::move(em), k);
    TrajectoryRow row;
    row.generation = gen;
    row.mean = pop.measure().mean();
    size_t frozen = 0, near = 0;
    for (double x : xs) {
      if (x == 1.0) ++frozen;
      if (x > 1.0 - 1e-9) ++near;
    }
    row.p_frozen = static_cast<double>(frozen) / static_cast<double>(n_samples);
    row.p_near_frozen = static_cast<double>(near) / static_cast<double>(n_samples);
    row.gap = reconstruction_gap(pop);
    row.quantiles.resize(quantile_grid);
    for (size_t j = 0; j < quantile_grid; ++j)
      row.quantiles[j] = pop.measure().quantile(
          (static_cast<double>(j) + 0.5) / static_cast<double>(quantile_grid));
    res.rows.push_back(std::move(row));
  }
  res.final_pop = pop;
  res.final_samples = std::move(xs);
  return res;
}

}  // namespace colrec
