#pragma once

// Convex combinations of spanning trees for an optimal x*.
//
// base_decomposition: restricted master over tree columns, pricing by a
// maximum-weight spanning tree on the simplex multipliers.
//
// structured_decomposition: the narrow cuts have distinct z-values
// 0 = w_0 < w_1 < ... < w_q <= 1. A tree placed in the sigma-segment
// [w_{k-1}, w_k) must cross every narrow cut with z >= w_k exactly once. Such a
// tree is a spanning tree of every layer between consecutive required cuts
// plus one edge between adjacent layers, so the maximum-weight tree of this
// shape is found layer by layer. One master LP with a convexity row per
// segment then decides, exactly, whether x* splits into segment-wise
// combinations; the existence of the ordered decomposition guarantees that it
// does. Trees are emitted segment by segment, which yields the prefix property
// with prefix boundaries exactly at the z-values.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathtsp/core_model.hpp"
#include "pathtsp/errors.hpp"
#include "pathtsp/lp_column_generation.hpp"
#include "pathtsp/path_lp.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp {

struct WeightedTree {
  std::vector<EdgeId> edges;  ///< sorted
  Rational weight;
  Rational sigma_begin;  ///< [sigma_begin, sigma_end) has length weight
  Rational sigma_end;
};

struct StructuredDecomposition {
  std::vector<WeightedTree> trees;
  std::size_t segments = 0;
  std::size_t pivots = 0;
  std::size_t oracle_calls = 0;
};

namespace detail {

inline std::vector<EdgeId> sorted_support(const EdgeVector<Rational>& x) {
  std::vector<EdgeId> s = x.support();
  for (EdgeId e : s)
    if (sgn(x[e]) < 0) throw InputError("negative entry in x");
  return s;
}

/// Maximum-weight spanning tree of every layer plus the heaviest support edge
/// between each pair of adjacent layers; nullopt if some layer is not
/// connected by support edges or two adjacent layers have no edge between them.
/// Ties go to the smaller edge id.
inline std::optional<std::vector<EdgeId>> best_layered_tree(const CompleteGraph& g, const std::vector<EdgeId>& support,
                                                            const std::vector<Rational>& weight, const std::vector<int>& layer,
                                                            int layer_count) {
  const int n = g.vertex_count();
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });

  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  std::vector<EdgeId> tree;
  std::vector<int> bridge(std::max(layer_count - 1, 0), -1);
  for (std::size_t i : order) {
    const Edge ed = g.edge(support[i]);
    const int lu = layer[ed.u], lv = layer[ed.v];
    if (lu == lv) {
      const int a = find(ed.u), b = find(ed.v);
      if (a == b) continue;
      root[std::max(a, b)] = std::min(a, b);
      tree.push_back(support[i]);
    } else if (std::abs(lu - lv) == 1) {
      int& slot = bridge[std::min(lu, lv)];
      if (slot < 0) slot = static_cast<int>(i);
    }
  }
  if (static_cast<int>(tree.size()) != n - layer_count) return std::nullopt;
  for (int b : bridge) {
    if (b < 0) return std::nullopt;
    tree.push_back(support[b]);
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

/// Layer index per vertex for a chain of nested sides (smallest first).
inline std::vector<int> layers_of(int n, const std::vector<VertexSet>& nested) {
  std::vector<int> layer(n, static_cast<int>(nested.size()));
  for (Vertex v = 0; v < n; ++v)
    for (std::size_t i = 0; i < nested.size(); ++i)
      if (nested[i].contains(v)) {
        layer[v] = static_cast<int>(i);
        break;
      }
  return layer;
}

inline int crossing_count(const CompleteGraph& g, const std::vector<EdgeId>& tree, VertexSet side) {
  int c = 0;
  for (EdgeId e : tree) c += g.crosses(e, side) ? 1 : 0;
  return c;
}

inline bool is_spanning_tree(const CompleteGraph& g, const std::vector<EdgeId>& edges) {
  const int n = g.vertex_count();
  if (static_cast<int>(edges.size()) != n - 1) return false;
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (EdgeId e : edges) {
    if (e < 0 || e >= g.edge_count()) return false;
    const Edge ed = g.edge(e);
    const int a = find(ed.u), b = find(ed.v);
    if (a == b) return false;
    root[a] = b;
  }
  return true;
}

struct Segment {
  Rational begin, end;
  std::vector<VertexSet> required;  ///< sides of the cuts every tree here crosses once
};

inline std::vector<Segment> segments_of(const NarrowCutChain& chain) {
  std::vector<Rational> w{Rational(0)};
  for (const NarrowCut& c : chain.cuts) w.push_back(c.z);
  w.push_back(Rational(1));
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  std::vector<Segment> out;
  for (std::size_t k = 1; k < w.size(); ++k) {
    Segment seg{w[k - 1], w[k], {}};
    for (const NarrowCut& c : chain.cuts)
      if (c.z >= w[k]) seg.required.push_back(c.cut.side);
    std::sort(seg.required.begin(), seg.required.end(), [](VertexSet a, VertexSet b) { return a.size() < b.size(); });
    out.push_back(std::move(seg));
  }
  return out;
}

/// Phase-one column generation over layered trees, one convexity row per
/// segment. Returns the trees per segment with their weights.
inline StructuredDecomposition decompose_by_segments(const FractionalSolution& xsol, const std::vector<Segment>& segs,
                                                     const std::vector<std::vector<EdgeId>>& seed_trees) {
  const MetricInstance& inst = xsol.instance;
  const CompleteGraph& g = inst.graph();
  const int n = inst.size();
  const std::vector<EdgeId> support = sorted_support(xsol.x);
  std::map<EdgeId, std::size_t> row_of;
  for (std::size_t r = 0; r < support.size(); ++r) row_of[support[r]] = r;

  std::vector<Rational> rhs;
  for (EdgeId e : support) rhs.push_back(xsol.x[e]);
  for (const Segment& s : segs) rhs.push_back(s.end - s.begin);

  std::vector<std::vector<int>> layer(segs.size());
  for (std::size_t k = 0; k < segs.size(); ++k) layer[k] = layers_of(n, segs[k].required);

  auto make_column = [&](const std::vector<EdgeId>& tree, std::size_t k) {
    lp::Column col;
    for (EdgeId e : tree) col.entries.push_back({row_of.at(e), Rational(1)});
    col.entries.push_back({support.size() + k, Rational(1)});
    col.cost = 0;
    col.tag = static_cast<long>(k);
    return col;
  };

  std::vector<lp::Column> seed;
  for (const auto& tree : seed_trees) {
    bool inside = true;
    for (EdgeId e : tree) inside &= row_of.count(e) > 0;
    if (!inside) continue;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      bool ok = true;
      for (VertexSet side : segs[k].required) ok &= crossing_count(g, tree, side) == 1;
      if (ok) seed.push_back(make_column(tree, k));
    }
  }

  lp::PricingOracle oracle = [&](const std::vector<Rational>& pi, bool) {
    std::vector<lp::Column> cols;
    std::vector<Rational> weight(support.size());
    for (std::size_t r = 0; r < support.size(); ++r) weight[r] = pi[r];
    for (std::size_t k = 0; k < segs.size(); ++k) {
      auto tree = best_layered_tree(g, support, weight, layer[k], static_cast<int>(segs[k].required.size()) + 1);
      if (!tree) continue;
      Rational gain = pi[support.size() + k];
      for (EdgeId e : *tree) gain += pi[row_of.at(e)];
      if (sgn(gain) > 0) cols.push_back(make_column(*tree, k));
    }
    return cols;
  };

  lp::ColumnGenerationSimplex simplex(rhs, std::move(seed));
  lp::ColumnGenerationOptions opt;
  opt.feasibility_only = true;
  const auto res = simplex.solve(oracle, opt);
  if (res.status != lp::Status::Optimal) throw InvariantError("x* is not a combination of spanning trees with the required crossing structure");

  StructuredDecomposition out;
  out.segments = segs.size();
  out.pivots = res.pivots;
  out.oracle_calls = res.oracle_calls;
  std::vector<std::pair<std::size_t, WeightedTree>> parts;
  for (std::size_t i = 0; i < res.columns.size(); ++i) {
    WeightedTree t;
    for (const auto& [r, v] : res.columns[i].entries)
      if (r < support.size()) t.edges.push_back(support[r]);
    std::sort(t.edges.begin(), t.edges.end());
    t.weight = res.values[i];
    parts.push_back({static_cast<std::size_t>(res.columns[i].tag), std::move(t)});
  }
  std::stable_sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.edges < b.second.edges;
  });
  Rational pos = 0;
  for (auto& [k, t] : parts) {
    t.sigma_begin = pos;
    pos += t.weight;
    t.sigma_end = pos;
    out.trees.push_back(std::move(t));
  }
  return out;
}

}  // namespace detail

/// x* as a convex combination of spanning trees, without ordering guarantees.
inline std::vector<WeightedTree> base_decomposition(const FractionalSolution& xsol) {
  std::vector<detail::Segment> whole{{Rational(0), Rational(1), {}}};
  return detail::decompose_by_segments(xsol, whole, {}).trees;
}

/// Reorders and re-splits x* into trees with the prefix property for every narrow cut.
/// The base trees are offered to the master LP as starting columns.
inline StructuredDecomposition structured_decomposition(const std::vector<WeightedTree>& base, const NarrowCutChain& chain,
                                                        const FractionalSolution& xsol) {
  std::vector<std::vector<EdgeId>> seed;
  for (const WeightedTree& t : base) seed.push_back(t.edges);
  return detail::decompose_by_segments(xsol, detail::segments_of(chain), seed);
}

struct DecompositionCheck {
  bool convex = false;          ///< weights positive, sum 1
  bool matches_x = false;       ///< sum p_j chi^{S_j} = x* per edge
  bool spanning = false;        ///< every S_j a spanning tree inside supp(x*)
  bool intervals = false;       ///< sigma-intervals tile [0,1) in order
  bool prefix = false;          ///< prefix property for every narrow cut
  std::vector<std::string> failures;

  bool passed() const { return convex && matches_x && spanning && intervals && prefix; }
};

/// Exact check of a structured decomposition against x* and its narrow cuts.
inline DecompositionCheck verify_structured(const std::vector<WeightedTree>& trees, const NarrowCutChain& chain, const FractionalSolution& xsol) {
  const CompleteGraph& g = xsol.instance.graph();
  DecompositionCheck out;

  Rational total = 0;
  out.convex = true;
  for (const WeightedTree& t : trees) {
    total += t.weight;
    if (sgn(t.weight) <= 0) out.convex = false;
  }
  if (total != 1) out.convex = false;
  if (!out.convex) out.failures.push_back("weights are not a convex combination (sum " + to_string(total) + ")");

  EdgeVector<Rational> sum(g.edge_count());
  out.spanning = true;
  for (std::size_t j = 0; j < trees.size(); ++j) {
    if (!detail::is_spanning_tree(g, trees[j].edges)) {
      out.spanning = false;
      out.failures.push_back("tree " + std::to_string(j) + " is not a spanning tree");
      continue;
    }
    for (EdgeId e : trees[j].edges) {
      sum[e] += trees[j].weight;
      if (sgn(xsol.x[e]) == 0) {
        out.spanning = false;
        out.failures.push_back("tree " + std::to_string(j) + " uses an edge outside supp(x*)");
      }
    }
  }
  out.matches_x = out.spanning && sum == xsol.x;
  if (out.spanning && !out.matches_x) out.failures.push_back("sum of weighted trees differs from x*");

  out.intervals = true;
  Rational pos = 0;
  for (const WeightedTree& t : trees) {
    if (t.sigma_begin != pos || t.sigma_end - t.sigma_begin != t.weight) out.intervals = false;
    pos = t.sigma_end;
  }
  if (pos != 1) out.intervals = false;
  if (!out.intervals) out.failures.push_back("sigma-intervals do not tile [0,1)");

  out.prefix = true;
  for (const NarrowCut& c : chain.cuts) {
    Rational cum = 0;
    bool found = sgn(c.z) == 0;
    for (const WeightedTree& t : trees) {
      if (found || !detail::is_spanning_tree(g, t.edges)) break;
      if (detail::crossing_count(g, t.edges, c.cut.side) != 1) break;
      cum += t.weight;
      if (cum == c.z) found = true;
      if (cum > c.z) break;
    }
    if (!found) {
      out.prefix = false;
      out.failures.push_back("no prefix of weight " + to_string(c.z) + " crosses " + to_string(c.cut.side) + " once");
    }
  }
  return out;
}

inline DecompositionCheck verify_structured(const StructuredDecomposition& dec, const NarrowCutChain& chain, const FractionalSolution& xsol) {
  return verify_structured(dec.trees, chain, xsol);
}

/// Weight of trees crossing each narrow cut exactly once, which in any convex
/// decomposition is at least 2 - x*(C). Returns the cuts where this fails.
inline std::vector<std::size_t> base_crossing_shortfalls(const std::vector<WeightedTree>& trees, const NarrowCutChain& chain,
                                                         const FractionalSolution& xsol) {
  const CompleteGraph& g = xsol.instance.graph();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    Rational once = 0;
    for (const WeightedTree& t : trees)
      if (detail::crossing_count(g, t.edges, chain[i].cut.side) == 1) once += t.weight;
    if (once < chain[i].z) out.push_back(i);
  }
  return out;
}

}  // namespace pathtsp
