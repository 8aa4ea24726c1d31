#include "colrec/tree.hpp"

#include <cmath>
#include <ostream>

#include "colrec/quad.hpp"

namespace colrec {

double OffspringLaw::effective_mean() const {
  switch (kind) {
    case Kind::Poisson:
      return mean;
    case Kind::Deterministic:
      return static_cast<double>(cap);
    case Kind::TruncatedPoisson: {
      // E[D' 1{D' <= cap}] = d' P(D' <= cap - 1).
      if (cap == 0) return 0.0;
      return mean * (1.0 - poisson_upper_tail(mean, cap - 1));
    }
  }
  return 0.0;
}

std::string OffspringLaw::describe() const {
  char buf[64];
  switch (kind) {
    case Kind::Poisson:
      std::snprintf(buf, sizeof buf, "poisson:%.17g", mean);
      return buf;
    case Kind::Deterministic:
      std::snprintf(buf, sizeof buf, "dary:%lld", static_cast<long long>(cap));
      return buf;
    case Kind::TruncatedPoisson:
      std::snprintf(buf, sizeof buf, "tpois:%.17g,%lld", mean,
                    static_cast<long long>(cap));
      return buf;
  }
  return "?";
}

int64_t sample_offspring(const OffspringLaw& law, RngStream& rng) {
  switch (law.kind) {
    case OffspringLaw::Kind::Poisson:
      return sample_poisson(law.mean, rng);
    case OffspringLaw::Kind::Deterministic:
      return law.cap;
    case OffspringLaw::Kind::TruncatedPoisson: {
      const int64_t d = sample_poisson(law.mean, rng);
      return d <= law.cap ? d : 0;
    }
  }
  return 0;
}

TreeSample sample_tree(const OffspringLaw& law, int depth_cap, RngStream& rng,
                       size_t node_ceiling) {
  if (depth_cap < 0) throw std::invalid_argument("sample_tree: depth_cap < 0");
  TreeSample t;
  t.depth_cap = depth_cap;
  t.parent.push_back(-1);
  t.depth.push_back(0);
  size_t level_begin = 0;
  for (int d = 0; d < depth_cap; ++d) {
    const size_t level_end = t.parent.size();
    if (level_begin == level_end) break;  // extinct
    for (size_t v = level_begin; v < level_end; ++v) {
      const int64_t c = sample_offspring(law, rng);
      t.child_begin.push_back(static_cast<int32_t>(t.parent.size()));
      for (int64_t i = 0; i < c; ++i) {
        if (t.parent.size() >= node_ceiling)
          throw std::length_error("sample_tree: node ceiling exceeded");
        t.parent.push_back(static_cast<int32_t>(v));
        t.depth.push_back(d + 1);
      }
      t.child_end.push_back(static_cast<int32_t>(t.parent.size()));
    }
    level_begin = level_end;
  }
  // Deepest level gets empty child ranges.
  while (t.child_begin.size() < t.parent.size()) {
    t.child_begin.push_back(static_cast<int32_t>(t.parent.size()));
    t.child_end.push_back(static_cast<int32_t>(t.parent.size()));
  }
  return t;
}

std::vector<int32_t> broadcast_colouring(const TreeSample& tree, int k, int root_colour,
                                         RngStream& rng) {
  if (k < 2) throw std::invalid_argument("broadcast_colouring: k < 2");
  if (root_colour < -1 || root_colour >= k)
    throw std::invalid_argument("broadcast_colouring: bad root colour");
  std::vector<int32_t> col(tree.size());
  col[0] = root_colour == -1
               ? static_cast<int32_t>(rng.next_below(static_cast<uint32_t>(k)))
               : root_colour;
  for (size_t v = 1; v < tree.size(); ++v) {
    const int32_t pc = col[static_cast<size_t>(tree.parent[v])];
    // Uniform over [k] minus the parent colour.
    int32_t c = static_cast<int32_t>(rng.next_below(static_cast<uint32_t>(k - 1)));
    if (c >= pc) ++c;
    col[v] = c;
  }
  return col;
}

bool is_proper(const TreeSample& tree, const std::vector<int32_t>& colours) {
  for (size_t v = 1; v < tree.size(); ++v)
    if (colours[v] == colours[static_cast<size_t>(tree.parent[v])]) return false;
  return true;
}

void dump_tree(const TreeSample& tree, const std::vector<int32_t>& colours,
               std::ostream& os) {
  for (size_t v = 0; v < tree.size(); ++v) {
    os << v << ' ' << tree.parent[v] << ' ' << tree.depth[v] << ' '
       << (v < colours.size() ? colours[v] : -1) << '\n';
  }
}

}  // namespace colrec
