#pragma once

#include <utility>
#include <vector>

#include "pathtsp/core_model.hpp"
#include "pathtsp/path_lp.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp::testing {

// Path metric s=0, a=1, ..., t=n-1 with unit steps.
inline MetricInstance path_metric(int n) {
  CompleteGraph g(n);
  std::vector<Rational> c(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge ed = g.edge(e);
    c[e] = ed.v - ed.u;
  }
  return MetricInstance(n, 0, n - 1, std::move(c));
}

inline MetricInstance p3() { return path_metric(3); }
inline MetricInstance p4() { return path_metric(4); }

inline MetricInstance two_vertices(long cost = 7) { return MetricInstance(2, 0, 1, {Rational(cost)}); }

// Shortest-path metric of an unweighted graph.
inline MetricInstance graph_metric(int n, const std::vector<std::pair<int, int>>& edges, Vertex s, Vertex t) {
  CompleteGraph g(n);
  std::vector<Rational> c(g.edge_count(), Rational(1000));
  for (auto [u, v] : edges) c[g.id(u, v)] = 1;
  return MetricInstance(n, s, t, metric_closure(n, c));
}

// Two rails of k vertices joined by k rungs.
inline MetricInstance ladder(int k, Vertex s, Vertex t) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < k; ++i) {
    edges.push_back({i, i + 1});
    edges.push_back({k + i, k + i + 1});
  }
  for (int i = 0; i < k; ++i) edges.push_back({i, k + i});
  return graph_metric(2 * k, edges, s, t);
}

inline EdgeVector<Rational> edge_vector(const CompleteGraph& g, const std::vector<std::pair<Edge, Rational>>& entries) {
  EdgeVector<Rational> x(g.edge_count());
  for (const auto& [e, v] : entries) x[g.id(e)] = v;
  return x;
}

// s=0, a=1, b=2, t=3 with x(sa)=x(sb)=x(at)=x(bt)=1/2 and x(ab)=1.
inline FractionalSolution fractional_square() {
  const MetricInstance inst = path_metric(4);
  const CompleteGraph& g = inst.graph();
  const Rational half = ratio(1, 2);
  FractionalSolution xs{inst, edge_vector(g, {{{0, 1}, half}, {{0, 2}, half}, {{1, 3}, half}, {{2, 3}, half}, {{1, 2}, Rational(1)}}), 0, 0, {}};
  xs.value = xs.x.cost_under(inst);
  return xs;
}

}  // namespace pathtsp::testing
