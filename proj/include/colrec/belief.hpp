// Exact posterior computation on sampled trees: the bottom-up belief
// recursion, the brute-force enumeration oracle it is checked against, and
// the projection onto star vectors.
#pragma once

#include <cstdint>
#include <vector>

#include "colrec/rng.hpp"
#include "colrec/tree.hpp"

namespace colrec {

using SimplexVector = std::vector<double>;  // k nonnegative entries, sum 1

// One distinguished coordinate `value` at colour `argmax`; the remaining
// coordinates are (1-value)/(k-1).
struct StarVector {
  double value;
  int argmax;  // 0-based colour
};

// P(sigma_root = . | tree, observed leaf colours). Observed leaves are the
// depth == depth_cap nodes; leaf_colours is indexed by node id and read only
// there. Nodes whose subtree carries no observation are marginalized out.
// Products are accumulated in log space with exact-zero tracking. Throws if
// the configuration admits no proper completion.
SimplexVector exact_posterior(const TreeSample& tree, int k,
                              const std::vector<int32_t>& leaf_colours);

// Enumeration oracle: counts proper completions per root colour. Throws when
// the number of backtracking steps exceeds step_ceiling or no completion
// exists.
SimplexVector brute_force_posterior(const TreeSample& tree, int k,
                                    const std::vector<int32_t>& leaf_colours,
                                    uint64_t step_ceiling = 200'000'000);

// Star projection: (max coordinate, argmax) with ties broken uniformly using
// rng. rel_tol widens the tie set for float-derived inputs; pass 0 for exact
// fixtures.
StarVector lambda_project(const SimplexVector& v, RngStream& rng, double rel_tol = 1e-9);

// The full star vector Lambda(v) as a simplex vector.
SimplexVector star_to_simplex(const StarVector& s, int k);

}  // namespace colrec
