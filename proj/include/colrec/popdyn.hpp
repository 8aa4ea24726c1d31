// Population dynamics for the reduced distributional recursion: arrival
// sampling per colour, the phi-space step Z_m -> (x_new, w_lower), the full
// simplex-vector step used as its oracle, and resampled iteration.
//
// Arrivals with phi = 0 are thinned out up front and atom/tail components are
// sampled stratified, so one root sample costs O(non-trivial arrivals) rather
// than O(d) bookkeeping per colour. Large-k sampling runs through the batch
// kernels.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "colrec/belief.hpp"
#include "colrec/measure.hpp"
#include "colrec/rng.hpp"
#include "colrec/tree.hpp"

namespace colrec {

struct TiltSplit {
  EmpiricalMeasure mu_eq;   // x pop(dx), normalized; empty when p_neq = 1
  EmpiricalMeasure mu_neq;  // (1-x) pop(dx), normalized; empty when p_neq = 0
  double p_neq = 0.0;
};
TiltSplit tilt_split(const StarMeasure& pop);

// Offspring counts per (colour, same/diff) class, conditioned on root colour 0.
struct ArrivalCounts {
  int64_t c1_neq = 0;          // colour 0 receives only "diff" arrivals
  std::vector<int64_t> c_eq;   // colours 1..k-1
  std::vector<int64_t> c_neq;  // colours 1..k-1
  int64_t total() const;
};

// Poisson offspring: independent Poissons with rates (p_neq D) for the root
// colour and ((1-p_neq) D, (k-2)/(k-1) p_neq D) otherwise, D = d/(k-1).
// Deterministic / truncated laws: total degree then a multinomial split.
ArrivalCounts sample_arrivals(const OffspringLaw& law, int k, double p_neq,
                              RngStream& rng);

// One arrival's phi-value law, decomposed for stratified sampling. Atoms may
// include +inf (frozen children); the optional tail is a quantile table in
// phi space on a uniform grid.
struct PhiMixtureSpec {
  double zero_mass = 0.0;
  std::vector<double> atom_phi;
  std::vector<double> atom_w;
  std::vector<double> tail_table;
  double tail_mass = 0.0;
  double total_mass() const;
};

// Quantile nodes of a density on [lo, hi] at `size` uniform quantile levels,
// built from panel integrals; nodes are monotone by construction.
std::vector<double> build_quantile_table(const std::function<double(double)>& density,
                                         double lo, double hi, size_t size = 16385);
double table_sample(const std::vector<double>& table, double u);

class ReducedStepSampler {
 public:
  // Compile from an empirical star population (any offspring law).
  ReducedStepSampler(const StarMeasure& pop, const OffspringLaw& law);

  // Compile from analytic per-arrival laws (Poisson offspring only):
  // `mix1` with intensity `rate1` drives the root colour, `mix2` with
  // intensity `rate2` drives each of the other k-1 colours.
  ReducedStepSampler(int k, double d, double rate1, PhiMixtureSpec mix1, double rate2,
                     PhiMixtureSpec mix2);

  struct Draw {
    double x_new;    // exact ||X_{n+1}||_inf of the lifted step
    double w_lower;  // phi-space lower bound computed from the same Z draws
  };

  struct Workspace {
    std::vector<uint64_t> u64s;
    std::vector<double> uvals;
    std::vector<double> vals;
    std::vector<int32_t> n_atom;
    std::vector<int32_t> n_tail;
    std::vector<double> z;
  };

  Draw sample(RngStream rng, Workspace& ws) const;

  int k() const { return k_; }
  double p_neq() const { return p_neq_; }

 private:
  struct Channel {
    double rate_nonzero = 0.0;     // Poisson intensity of non-trivial arrivals
    double p_single = 0.0;         // P(single atom | nonzero)
    double single_phi = 0.0;
    bool has_single = false;
    AliasTable atoms;              // general atom part (conditional weights)
    std::vector<double> atom_phi;
    double p_atoms = 0.0;          // P(general atom | nonzero)
    std::vector<double> tail;      // quantile table
    double p_tail = 0.0;           // P(tail | nonzero)
    bool batchable = false;        // single atom + optional tail
    PoissonTable pois_atom;        // counts for the single atom lane
    PoissonTable pois_tail;        // counts for the tail lane
    PoissonTable pois_all;         // counts for the general path
    double sample_value(RngStream& rng) const;
    void finalize();
  };

  static Channel combine(double rate_a, const PhiMixtureSpec& a, double rate_b,
                         const PhiMixtureSpec& b);

  Draw assemble(double z1, std::vector<double>& z, bool any_arrival) const;
  void sample_scalar_channel(const Channel& ch, RngStream& rng, double& z_acc) const;

  int k_ = 0;
  double d_ = 0.0;
  double p_neq_ = 0.0;
  bool poisson_path_ = false;
  OffspringLaw law_{};
  // Multinomial path keeps the =/!= mixtures separate.
  PhiMixtureSpec eq_spec_, neq_spec_;
  AliasTable eq_outcomes_, neq_outcomes_;  // zero | atom_j | tail
  Channel ch1_;  // root colour (diff arrivals only)
  Channel ch2_;  // each non-root colour (superposed same+diff arrivals)
};

// Single-draw convenience used by tests.
ReducedStepSampler::Draw reduced_step_sample(const ReducedStepSampler& sampler,
                                             RngStream rng);

// One sample of Gamma(Pi_0 pop) materialized on simplex vectors (oracle for
// the reduced path). Guarded to k <= 64.
SimplexVector gamma_full_step(const StarMeasure& pop, const OffspringLaw& law,
                              RngStream& rng);

// E[||X||_inf - 1/k] under pop.
double reconstruction_gap(const StarMeasure& pop);

struct TrajectoryRow {
  int generation;
  double mean;
  double p_frozen;     // P(x == 1 exactly)
  double p_near_frozen;  // P(x > 1 - 1e-9)
  double gap;
  std::vector<double> quantiles;  // fixed grid
};

struct IterateResult {
  std::vector<TrajectoryRow> rows;
  StarMeasure final_pop;
  std::vector<double> final_samples;
};

// Resampled population dynamics: each generation draws n_samples fresh values
// through the reduced step and re-forms an empirical star measure.
IterateResult iterate(const StarMeasure& pop0, const OffspringLaw& law, int n_steps,
                      size_t n_samples, uint64_t seed, unsigned workers,
                      size_t quantile_grid = 512);

}  // namespace colrec
