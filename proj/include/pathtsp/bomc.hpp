#pragma once

// Best-of-many Christofides with lonely edge deletion.
//
// For every tree S_j of a structured decomposition: delete the lonely edges
// (the single edge of S_j in a narrow cut C with sigma_end(j) <= 2 - x*(C)),
// correct parities of the remaining forest F_j with a T_j-join that is minimum
// for the modified cost c^j, reconnect with a cheapest set R_j of lonely edges,
// double R_j, walk the Eulerian s-t walk and shortcut. Return the cheapest tour.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pathtsp/core_model.hpp"
#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"
#include "pathtsp/path_lp.hpp"
#include "pathtsp/rational.hpp"
#include "pathtsp/tree_decomp.hpp"

namespace pathtsp {

/// Largest parity set handled by the subset-DP matching.
inline constexpr int kMaxParitySet = 20;

struct LonelyCut {
  std::size_t cut;  ///< index into the chain
  EdgeId edge;      ///< the single tree edge in C
};

struct TreeContext {
  std::size_t j = 0;
  std::vector<EdgeId> tree;
  std::vector<LonelyCut> lonely;
  std::vector<EdgeId> forest;  ///< tree minus lonely edges
  VertexSet parity;            ///< T_j
  EdgeVector<Rational> modified_cost;
};

/// Edges of `tree` crossing the cut with side U.
inline std::vector<EdgeId> tree_edges_in_cut(const CompleteGraph& g, const std::vector<EdgeId>& tree, VertexSet U) {
  std::vector<EdgeId> out;
  for (EdgeId e : tree)
    if (g.crosses(e, U)) out.push_back(e);
  return out;
}

/// Odd-degree vertices of an edge set, as a set.
inline VertexSet odd_degree_vertices(const CompleteGraph& g, const std::vector<EdgeId>& edges) {
  VertexSet out;
  for (EdgeId e : edges) {
    const Edge ed = g.edge(e);
    out = out ^ VertexSet::of({ed.u, ed.v});
  }
  return out;
}

inline TreeContext build_tree_context(const StructuredDecomposition& dec, const NarrowCutChain& chain, const MetricInstance& inst, std::size_t j) {
  if (j >= dec.trees.size()) throw InputError("tree index out of range");
  const CompleteGraph& g = inst.graph();
  const WeightedTree& wt = dec.trees[j];
  TreeContext ctx;
  ctx.j = j;
  ctx.tree = wt.edges;

  std::vector<Rational> lonely_cost;  // c(C cap S_j) per lonely cut
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto in_cut = tree_edges_in_cut(g, wt.edges, chain[i].cut.side);
    if (in_cut.size() == 1 && wt.sigma_end <= chain[i].z) {
      ctx.lonely.push_back({i, in_cut[0]});
      lonely_cost.push_back(inst.cost(in_cut[0]));
    }
  }
  for (EdgeId e : wt.edges) {
    bool is_lonely = false;
    for (const LonelyCut& l : ctx.lonely) is_lonely |= l.edge == e;
    if (!is_lonely) ctx.forest.push_back(e);
  }
  ctx.parity = odd_degree_vertices(g, ctx.forest) ^ VertexSet::of({inst.source(), inst.sink()});

  ctx.modified_cost = EdgeVector<Rational>(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    Rational sum = 0, mx = 0;
    for (std::size_t l = 0; l < ctx.lonely.size(); ++l) {
      if (!g.crosses(e, chain[ctx.lonely[l].cut].cut.side)) continue;
      const Rational twice = 2 * lonely_cost[l];
      sum += twice;
      mx = std::max(mx, twice);
    }
    ctx.modified_cost[e] = inst.cost(e) + sum - mx;
  }
  return ctx;
}

struct TJoin {
  std::vector<EdgeId> edges;  ///< sorted, each edge at most once
  Rational cost;
};

/// Minimum-cost T-join for nonnegative costs: shortest paths between all pairs,
/// an exact minimum perfect matching on T by dynamic programming over subsets,
/// and the symmetric difference of the matched paths.
inline TJoin min_tjoin(const MetricInstance& inst, const EdgeVector<Rational>& cost, VertexSet T) {
  const CompleteGraph& g = inst.graph();
  const int n = inst.size();
  if (T.size() % 2 != 0) throw InputError("T-join needs |T| even, got " + std::to_string(T.size()));
  if (T.size() > kMaxParitySet) throw ResourceError("|T| = " + std::to_string(T.size()) + " exceeds the matching limit " + std::to_string(kMaxParitySet));
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (cost[e] < 0) throw InputError("T-join costs must be nonnegative");
  TJoin out{{}, Rational(0)};
  if (T.empty()) return out;

  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n, 0));
  std::vector<std::vector<Vertex>> via(n, std::vector<Vertex>(n, -1));
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = 0; v < n; ++v)
      if (u != v) d[u][v] = cost[g.id(u, v)];
  for (Vertex k = 0; k < n; ++k)
    for (Vertex i = 0; i < n; ++i)
      for (Vertex j = 0; j < n; ++j)
        if (i != j && i != k && j != k && d[i][k] + d[k][j] < d[i][j]) {
          d[i][j] = d[i][k] + d[k][j];
          via[i][j] = k;
        }

  const std::vector<Vertex> term = T.members();
  const int k = static_cast<int>(term.size());
  const std::uint32_t full = (std::uint32_t{1} << k) - 1;
  std::vector<Rational> best(full + 1);
  std::vector<int> partner(full + 1, -1);
  std::vector<bool> known(full + 1, false);
  best[0] = 0;
  known[0] = true;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if (std::popcount(mask) % 2 != 0) continue;
    const int a = std::countr_zero(mask);
    for (int b = a + 1; b < k; ++b) {
      if (!((mask >> b) & 1U)) continue;
      const std::uint32_t rest = mask & ~(std::uint32_t{1} << a) & ~(std::uint32_t{1} << b);
      Rational c = best[rest] + d[term[a]][term[b]];
      if (!known[mask] || c < best[mask]) {
        best[mask] = std::move(c);
        partner[mask] = b;
        known[mask] = true;
      }
    }
  }

  std::vector<bool> odd(g.edge_count(), false);
  auto add_path = [&](auto&& self, Vertex u, Vertex v) -> void {
    if (via[u][v] < 0) {
      odd[g.id(u, v)] = !odd[g.id(u, v)];
      return;
    }
    self(self, u, via[u][v]);
    self(self, via[u][v], v);
  };
  for (std::uint32_t mask = full; mask != 0;) {
    const int a = std::countr_zero(mask), b = partner[mask];
    add_path(add_path, term[a], term[b]);
    mask &= ~(std::uint32_t{1} << a) & ~(std::uint32_t{1} << b);
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (odd[e]) {
      out.edges.push_back(e);
      out.cost += cost[e];
    }
  if (out.cost > best[full]) throw InvariantError("T-join costs more than the matching");
  return out;
}

/// Cheapest subset of the lonely edges reconnecting F cup J.
inline std::vector<EdgeId> reconnect(const MetricInstance& inst, const std::vector<EdgeId>& F, const std::vector<EdgeId>& J,
                                     const std::vector<EdgeId>& lonely_edges) {
  const CompleteGraph& g = inst.graph();
  Multigraph base(inst.size());
  for (EdgeId e : F) base.add_edge(g.edge(e));
  for (EdgeId e : J) base.add_edge(g.edge(e));
  std::vector<CandidateEdge> cand;
  for (EdgeId e : lonely_edges) cand.push_back({g.edge(e), inst.cost(e)});
  std::vector<std::size_t> pick;
  try {
    pick = min_spanning_connector(connected_components(base), cand);
  } catch (const StructureError& err) {
    throw InvariantError(std::string("lonely edges cannot reconnect the forest: ") + err.what());
  }
  std::vector<EdgeId> R;
  for (std::size_t i : pick) R.push_back(lonely_edges[i]);
  std::sort(R.begin(), R.end());
  return R;
}

struct TreeTourResult {
  std::size_t j = 0;
  TJoin join;  ///< cost field holds c^j(J)
  std::vector<EdgeId> reconnection;
  Multigraph H;
  std::vector<Vertex> walk;
  HamiltonianPath tour;
  Rational tree_cost;        ///< c(S_j)
  Rational forest_cost;      ///< c(F_j)
  Rational join_cost;        ///< c(J_j)
  Rational reconnect_cost;   ///< c(R_j)
};

inline TreeTourResult tour_from_tree(const TreeContext& ctx, const MetricInstance& inst) {
  const CompleteGraph& g = inst.graph();
  TreeTourResult out;
  out.j = ctx.j;
  out.join = min_tjoin(inst, ctx.modified_cost, ctx.parity);
  std::vector<EdgeId> lonely_edges;
  for (const LonelyCut& l : ctx.lonely) lonely_edges.push_back(l.edge);
  std::sort(lonely_edges.begin(), lonely_edges.end());
  lonely_edges.erase(std::unique(lonely_edges.begin(), lonely_edges.end()), lonely_edges.end());
  out.reconnection = reconnect(inst, ctx.forest, out.join.edges, lonely_edges);

  out.H = Multigraph(inst.size());
  for (EdgeId e : ctx.forest) out.H.add_edge(g.edge(e));
  for (EdgeId e : out.join.edges) out.H.add_edge(g.edge(e));
  for (EdgeId e : out.reconnection) out.H.add_edge(g.edge(e), 2);

  out.tree_cost = inst.cost_of(ctx.tree);
  out.forest_cost = inst.cost_of(ctx.forest);
  out.join_cost = inst.cost_of(out.join.edges);
  out.reconnect_cost = inst.cost_of(out.reconnection);
  if (out.join_cost + 2 * out.reconnect_cost > out.join.cost)
    throw InvariantError("tree " + std::to_string(ctx.j) + ": c(J) + 2c(R) exceeds c^j(J)");

  if (out.H.odd_vertices() != VertexSet::of({inst.source(), inst.sink()})) throw InvariantError("H has wrong parities");
  if (connected_components(out.H).size() != 1) throw InvariantError("H is not connected");
  out.walk = eulerian_st_walk(out.H, inst.source(), inst.sink());
  out.tour = shortcut(out.walk, inst);
  if (out.tour.cost > out.H.cost(inst)) throw InvariantError("shortcut increased the cost");
  return out;
}

struct BomcResult {
  FractionalSolution lp;
  NarrowCutChain chain;
  std::vector<WeightedTree> base;
  StructuredDecomposition decomposition;
  DecompositionCheck decomposition_check;
  std::vector<TreeContext> contexts;
  std::vector<TreeTourResult> tours;
  std::size_t best = 0;  ///< index of the cheapest tour (smallest on ties)
  Rational best_cost;
  /// best_cost / c(x*); 1 when both are zero.
  Rational ratio;

  const HamiltonianPath& best_tour() const { return tours[best].tour; }
};

inline BomcResult best_of_many(const MetricInstance& inst) {
  BomcResult out;
  out.lp = solve_path_lp(inst);
  out.chain = narrow_cuts(out.lp);
  out.base = base_decomposition(out.lp);
  out.decomposition = structured_decomposition(out.base, out.chain, out.lp);
  out.decomposition_check = verify_structured(out.decomposition, out.chain, out.lp);
  if (!out.decomposition_check.passed()) throw InvariantError("structured decomposition failed verification: " + out.decomposition_check.failures.front());
  for (std::size_t j = 0; j < out.decomposition.trees.size(); ++j) {
    out.contexts.push_back(build_tree_context(out.decomposition, out.chain, inst, j));
    out.tours.push_back(tour_from_tree(out.contexts.back(), inst));
    if (j == 0 || out.tours[j].tour.cost < out.tours[out.best].tour.cost) out.best = j;
  }
  out.best_cost = out.tours[out.best].tour.cost;
  if (sgn(out.lp.value) == 0) {
    out.ratio = sgn(out.best_cost) == 0 ? Rational(1) : Rational(-1);
    if (sgn(out.best_cost) != 0) throw InvariantError("positive tour cost over a zero LP value");
  } else {
    out.ratio = out.best_cost / out.lp.value;
  }
  return out;
}

}  // namespace pathtsp
