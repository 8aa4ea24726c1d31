// Galton-Watson tree sampling and the colour broadcast channel
// M(i,j) = 1/(k-1) 1{i != j}.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "colrec/rng.hpp"

namespace colrec {

struct OffspringLaw {
  enum class Kind { Poisson, Deterministic, TruncatedPoisson };
  Kind kind = Kind::Poisson;
  double mean = 0.0;  // d for Poisson, d' for TruncatedPoisson
  int64_t cap = 0;    // arity for Deterministic, cap d for TruncatedPoisson

  static OffspringLaw poisson(double d) {
    if (!(d > 0.0)) throw std::invalid_argument("poisson law: d must be positive");
    return {Kind::Poisson, d, 0};
  }
  static OffspringLaw dary(int64_t d) {
    if (d <= 0) throw std::invalid_argument("d-ary law: d must be positive");
    return {Kind::Deterministic, static_cast<double>(d), d};
  }
  // Law of D' 1{D' <= cap}, D' ~ Pois(dprime): overflow collapses to 0.
  static OffspringLaw tpois(double dprime, int64_t cap) {
    if (!(dprime > 0.0)) throw std::invalid_argument("tpois law: d' must be positive");
    if (cap < 0) throw std::invalid_argument("tpois law: cap must be >= 0");
    return {Kind::TruncatedPoisson, dprime, cap};
  }

  // Mean offspring number used for rate computations (exact for each law).
  double effective_mean() const;
  std::string describe() const;
};

int64_t sample_offspring(const OffspringLaw& law, RngStream& rng);

// Arena tree: children of node v are the contiguous range
// [child_begin[v], child_end[v]); node 0 is the root.
struct TreeSample {
  std::vector<int32_t> parent;  // -1 at the root
  std::vector<int32_t> child_begin;
  std::vector<int32_t> child_end;
  std::vector<int32_t> depth;
  int depth_cap = 0;

  size_t size() const { return parent.size(); }
  int32_t n_children(int32_t v) const { return child_end[v] - child_begin[v]; }
  bool is_observed_leaf(int32_t v) const { return depth[v] == depth_cap; }
};

// Breadth-first sampling of the first depth_cap levels; branches may die out
// earlier. Throws if the node count exceeds node_ceiling.
TreeSample sample_tree(const OffspringLaw& law, int depth_cap, RngStream& rng,
                       size_t node_ceiling = 10'000'000);

// Proper colouring broadcast down the tree. Colours are 0-based; root colour
// is fixed in [0,k) or uniform when root_colour == -1. Children are uniform
// on the k-1 colours different from the parent.
std::vector<int32_t> broadcast_colouring(const TreeSample& tree, int k, int root_colour,
                                         RngStream& rng);

bool is_proper(const TreeSample& tree, const std::vector<int32_t>& colours);

// Line-oriented dump: "index parent depth colour" per node.
void dump_tree(const TreeSample& tree, const std::vector<int32_t>& colours,
               std::ostream& os);

}  // namespace colrec
