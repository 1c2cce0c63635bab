#pragma once

// Combinatorial toolbox: max-flow/min-cut on the complete graph with rational
// capacities, components, a contracted minimum spanning connector, Eulerian
// s-t walks in multigraphs and shortcutting.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "pathtsp/core_model.hpp"
#include "pathtsp/errors.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp {

struct MinCut {
  Rational value;
  VertexSet side;  ///< inclusion-minimal source side
};

/// Edmonds-Karp between vertex sets S and T of the complete graph, undirected
/// capacities cap[e]. The returned side is the set reachable from S in the
/// final residual graph, which is the unique inclusion-minimal minimum cut.
inline MinCut max_flow_min_cut(const CompleteGraph& g, const EdgeVector<Rational>& cap, VertexSet S, VertexSet T) {
  const int n = g.vertex_count();
  if (S.empty() || T.empty()) throw InputError("max flow needs nonempty terminal sets");
  if (!(S & T).empty()) throw InputError("source and sink sets intersect at " + to_string(S & T));
  if (cap.size() != g.edge_count()) throw InputError("capacity vector has the wrong length");

  std::vector<std::vector<Rational>> res(n, std::vector<Rational>(n, 0));
  std::vector<std::vector<Vertex>> adj(n);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (cap[e] < 0) throw InputError("negative capacity");
    if (sgn(cap[e]) == 0) continue;
    const Edge ed = g.edge(e);
    res[ed.u][ed.v] = res[ed.v][ed.u] = cap[e];
    adj[ed.u].push_back(ed.v);
    adj[ed.v].push_back(ed.u);
  }

  Rational flow = 0;
  std::vector<Vertex> parent(n);
  for (;;) {
    std::fill(parent.begin(), parent.end(), -1);
    std::deque<Vertex> queue;
    for (Vertex v : S.members()) {
      parent[v] = v;
      queue.push_back(v);
    }
    Vertex reached = -1;
    while (!queue.empty() && reached < 0) {
      const Vertex u = queue.front();
      queue.pop_front();
      for (Vertex w : adj[u]) {
        if (parent[w] >= 0 || sgn(res[u][w]) <= 0) continue;
        parent[w] = u;
        if (T.contains(w)) {
          reached = w;
          break;
        }
        queue.push_back(w);
      }
    }
    if (reached < 0) break;
    Rational bottleneck = res[parent[reached]][reached];
    for (Vertex v = reached; !S.contains(v); v = parent[v]) bottleneck = std::min(bottleneck, res[parent[v]][v]);
    for (Vertex v = reached; !S.contains(v); v = parent[v]) {
      res[parent[v]][v] -= bottleneck;
      res[v][parent[v]] += bottleneck;
    }
    flow += bottleneck;
  }

  MinCut out;
  for (Vertex v = 0; v < n; ++v)
    if (parent[v] >= 0) out.side.insert(v);
  out.value = 0;
  for (EdgeId e : g.cut_edges(out.side)) out.value += cap[e];
  if (out.value != flow) throw InvariantError("max flow " + to_string(flow) + " differs from cut capacity " + to_string(out.value));
  return out;
}

/// Components of a multigraph, each represented by its vertex set, ordered by smallest member.
inline std::vector<VertexSet> connected_components(const Multigraph& g) {
  const int n = g.vertex_count();
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (const auto& [e, m] : g.edges()) {
    const int a = find(e.u), b = find(e.v);
    if (a != b) root[std::max(a, b)] = std::min(a, b);
  }
  std::vector<VertexSet> out;
  std::vector<int> slot(n, -1);
  for (Vertex v = 0; v < n; ++v) {
    const int r = find(v);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot[r]].insert(v);
  }
  return out;
}

struct CandidateEdge {
  Edge edge;
  Rational cost;
};

/// Indices of a minimum-cost subset of `candidates` connecting all `components`
/// (Kruskal on the contracted graph; ties go to the earlier candidate).
inline std::vector<std::size_t> min_spanning_connector(const std::vector<VertexSet>& components, const std::vector<CandidateEdge>& candidates) {
  auto owner = [&](Vertex v) {
    for (std::size_t i = 0; i < components.size(); ++i)
      if (components[i].contains(v)) return static_cast<int>(i);
    throw InputError("candidate edge endpoint " + std::to_string(v) + " lies in no component");
  };
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return candidates[a].cost < candidates[b].cost; });

  std::vector<int> root(components.size());
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  std::vector<std::size_t> chosen;
  std::size_t groups = components.size();
  for (std::size_t i : order) {
    if (groups <= 1) break;
    const int a = find(owner(candidates[i].edge.u)), b = find(owner(candidates[i].edge.v));
    if (a == b) continue;
    root[std::max(a, b)] = std::min(a, b);
    chosen.push_back(i);
    --groups;
  }
  if (groups > 1) throw StructureError("candidate edges cannot connect the " + std::to_string(components.size()) + " components");
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

/// Eulerian walk from s to t using every edge of g exactly once (Hierholzer;
/// at each vertex the smallest available neighbour is taken first).
inline std::vector<Vertex> eulerian_st_walk(const Multigraph& g, Vertex s, Vertex t) {
  const int n = g.vertex_count();
  if (s == t) throw InputError("eulerian_st_walk needs s != t");
  for (Vertex v = 0; v < n; ++v) {
    const bool odd = g.degree(v) % 2 != 0;
    const bool terminal = v == s || v == t;
    if (odd != terminal) {
      throw StructureError("vertex " + std::to_string(v) + " has degree " + std::to_string(g.degree(v)) +
                           (terminal ? " but must be odd" : " but must be even"));
    }
  }
  const auto comps = connected_components(g);
  int active = 0;
  for (const VertexSet& c : comps) {
    bool used = false;
    for (Vertex v : c.members()) used |= g.degree(v) > 0;
    if (used) ++active;
  }
  if (active > 1) throw StructureError("multigraph is disconnected (" + std::to_string(active) + " components carry edges)");

  std::vector<std::vector<int>> mult(n, std::vector<int>(n, 0));
  for (const auto& [e, m] : g.edges()) mult[e.u][e.v] = mult[e.v][e.u] = m;
  std::vector<Vertex> next(n, 0);
  std::vector<Vertex> stack{s}, walk;
  while (!stack.empty()) {
    const Vertex u = stack.back();
    Vertex& w = next[u];
    while (w < n && mult[u][w] == 0) ++w;
    if (w == n) {
      walk.push_back(u);
      stack.pop_back();
    } else {
      --mult[u][w];
      --mult[w][u];
      stack.push_back(w);
    }
  }
  std::reverse(walk.begin(), walk.end());
  if (static_cast<int>(walk.size()) != g.edge_total() + 1 || walk.back() != t) throw InvariantError("Eulerian walk construction failed");
  return walk;
}

struct HamiltonianPath {
  std::vector<Vertex> order;
  Rational cost;
};

/// Keeps the first occurrence of every vertex; t is moved to the end.
inline HamiltonianPath shortcut(const std::vector<Vertex>& walk, const MetricInstance& inst) {
  const int n = inst.size();
  const Vertex s = inst.source(), t = inst.sink();
  if (walk.empty() || walk.front() != s || walk.back() != t) throw InputError("walk must run from s to t");
  std::vector<bool> seen(n, false);
  HamiltonianPath out;
  for (Vertex v : walk) {
    if (v < 0 || v >= n) throw InputError("walk vertex out of range");
    if (seen[v] || v == t) continue;
    seen[v] = true;
    out.order.push_back(v);
  }
  out.order.push_back(t);
  if (static_cast<int>(out.order.size()) != n) {
    for (Vertex v = 0; v < n; ++v)
      if (!seen[v] && v != t) throw StructureError("walk misses vertex " + std::to_string(v));
  }
  out.cost = inst.walk_cost(out.order);
  return out;
}

/// True if `order` visits every vertex exactly once, from s to t.
inline bool is_hamiltonian_st_path(const std::vector<Vertex>& order, const MetricInstance& inst) {
  const int n = inst.size();
  if (static_cast<int>(order.size()) != n || order.front() != inst.source() || order.back() != inst.sink()) return false;
  std::vector<bool> seen(n, false);
  for (Vertex v : order) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

}  // namespace pathtsp
