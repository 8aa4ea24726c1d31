#include "colrec/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace colrec {

namespace {

// Per-colour log of the unnormalized belief, with exact zeros flagged.
struct LogBelief {
  std::vector<double> logv;
  std::vector<uint8_t> zero;
};

// Normalized belief from accumulated log products.
SimplexVector normalize_log(const LogBelief& lb, int k) {
  double best = -HUGE_VAL;
  for (int l = 0; l < k; ++l)
    if (!lb.zero[static_cast<size_t>(l)]) best = std::max(best, lb.logv[static_cast<size_t>(l)]);
  if (best == -HUGE_VAL)
    throw std::runtime_error("exact_posterior: leaf configuration has no proper completion");
  double denom = 0.0;
  SimplexVector out(static_cast<size_t>(k), 0.0);
  for (int l = 0; l < k; ++l) {
    if (lb.zero[static_cast<size_t>(l)]) continue;
    out[static_cast<size_t>(l)] = std::exp(lb.logv[static_cast<size_t>(l)] - best);
    denom += out[static_cast<size_t>(l)];
  }
  for (int l = 0; l < k; ++l) out[static_cast<size_t>(l)] /= denom;
  return out;
}

}  // namespace

SimplexVector exact_posterior(const TreeSample& tree, int k,
                              const std::vector<int32_t>& leaf_colours) {
  if (k < 2) throw std::invalid_argument("exact_posterior: k < 2");
  const size_t n = tree.size();
  std::vector<SimplexVector> belief(n);
  // Children precede parents in reverse index order (BFS arena).
  for (size_t vi = n; vi-- > 0;) {
    const int32_t v = static_cast<int32_t>(vi);
    if (tree.is_observed_leaf(v)) {
      const int32_t c = leaf_colours[vi];
      if (c < 0 || c >= k) throw std::invalid_argument("exact_posterior: bad leaf colour");
      SimplexVector e(static_cast<size_t>(k), 0.0);
      e[static_cast<size_t>(c)] = 1.0;
      belief[vi] = std::move(e);
      continue;
    }
    if (tree.n_children(v) == 0) {
      // Extinct branch: no observation below, marginalized to uniform.
      belief[vi].assign(static_cast<size_t>(k), 1.0 / static_cast<double>(k));
      continue;
    }
    LogBelief lb;
    lb.logv.assign(static_cast<size_t>(k), 0.0);
    lb.zero.assign(static_cast<size_t>(k), 0);
    for (int32_t u = tree.child_begin[vi]; u < tree.child_end[vi]; ++u) {
      const SimplexVector& f = belief[static_cast<size_t>(u)];
      for (int l = 0; l < k; ++l) {
        const size_t li = static_cast<size_t>(l);
        if (lb.zero[li]) continue;
        const double fl = f[li];
        if (fl >= 1.0) {
          lb.zero[li] = 1;  // frozen exclusion short-circuits
        } else {
          lb.logv[li] += std::log1p(-fl);
        }
      }
      belief[static_cast<size_t>(u)].clear();
    }
    belief[vi] = normalize_log(lb, k);
  }
  return belief[0];
}

namespace {

struct BruteForce {
  const TreeSample& tree;
  int k;
  const std::vector<int32_t>& leaf;
  uint64_t steps = 0;
  uint64_t ceiling;
  std::vector<int32_t> col;

  // Counts proper completions of nodes order[i..] given already-fixed parents.
  double count_from(const std::vector<int32_t>& order, size_t i) {
    if (++steps > ceiling)
      throw std::length_error("brute_force_posterior: step ceiling exceeded");
    if (i == order.size()) return 1.0;
    const int32_t v = order[i];
    const int32_t p = tree.parent[static_cast<size_t>(v)];
    const int32_t pc = p < 0 ? -1 : col[static_cast<size_t>(p)];
    if (tree.is_observed_leaf(v)) {
      const int32_t c = leaf[static_cast<size_t>(v)];
      if (c == pc) return 0.0;
      col[static_cast<size_t>(v)] = c;
      return count_from(order, i + 1);
    }
    double total = 0.0;
    for (int32_t c = 0; c < k; ++c) {
      if (c == pc) continue;
      col[static_cast<size_t>(v)] = c;
      total += count_from(order, i + 1);
    }
    return total;
  }
};

}  // namespace

SimplexVector brute_force_posterior(const TreeSample& tree, int k,
                                    const std::vector<int32_t>& leaf_colours,
                                    uint64_t step_ceiling) {
  if (k < 2) throw std::invalid_argument("brute_force_posterior: k < 2");
  BruteForce bf{tree, k, leaf_colours, 0, step_ceiling, {}};
  bf.col.assign(tree.size(), -1);
  std::vector<int32_t> order(tree.size());
  for (size_t i = 0; i < tree.size(); ++i) order[i] = static_cast<int32_t>(i);
  // BFS arena order already puts parents before children.
  SimplexVector counts(static_cast<size_t>(k), 0.0);
  double total = 0.0;
  for (int32_t rc = 0; rc < k; ++rc) {
    if (tree.is_observed_leaf(0) && leaf_colours[0] != rc) continue;
    bf.col[0] = rc;
    const double c = tree.size() == 1 ? 1.0 : bf.count_from(order, 1);
    counts[static_cast<size_t>(rc)] = c;
    total += c;
  }
  if (total <= 0.0)
    throw std::runtime_error("brute_force_posterior: no proper completion");
  for (double& c : counts) c /= total;
  return counts;
}

StarVector lambda_project(const SimplexVector& v, RngStream& rng, double rel_tol) {
  const int k = static_cast<int>(v.size());
  double best = v[0];
  for (int l = 1; l < k; ++l) best = std::max(best, v[static_cast<size_t>(l)]);
  const double cut = best - rel_tol * std::max(best, 1e-300);
  int ties = 0;
  for (int l = 0; l < k; ++l)
    if (v[static_cast<size_t>(l)] >= cut) ++ties;
  int pick = ties == 1 ? 0 : static_cast<int>(rng.next_below(static_cast<uint32_t>(ties)));
  for (int l = 0; l < k; ++l) {
    if (v[static_cast<size_t>(l)] >= cut && pick-- == 0) return {best, l};
  }
  return {best, k - 1};
}

SimplexVector star_to_simplex(const StarVector& s, int k) {
  SimplexVector v(static_cast<size_t>(k),
                  (1.0 - s.value) / static_cast<double>(k - 1));
  v[static_cast<size_t>(s.argmax)] = s.value;
  return v;
}

}  // namespace colrec
