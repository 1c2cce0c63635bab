#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "pathtsp/graph.hpp"
#include "support/instances.hpp"

namespace pathtsp {
namespace {

using testing::edge_vector;
using testing::p3;
using testing::p4;

TEST(MaxFlow, PathSupport) {
  CompleteGraph g(3);
  const auto cap = edge_vector(g, {{{0, 1}, Rational(1)}, {{1, 2}, Rational(1)}});
  const MinCut c = max_flow_min_cut(g, cap, VertexSet::of({0}), VertexSet::of({2}));
  EXPECT_EQ(c.value, 1);
  EXPECT_EQ(c.side, VertexSet::of({0}));
}

TEST(MaxFlow, TriangleHasTwoPaths) {
  CompleteGraph g(3);
  const auto cap = edge_vector(g, {{{0, 1}, Rational(1)}, {{1, 2}, Rational(1)}, {{0, 2}, Rational(1)}});
  EXPECT_EQ(max_flow_min_cut(g, cap, VertexSet::of({0}), VertexSet::of({2})).value, 2);
}

TEST(MaxFlow, ZeroCapacities) {
  CompleteGraph g(4);
  EdgeVector<Rational> cap(g.edge_count());
  const MinCut c = max_flow_min_cut(g, cap, VertexSet::of({0}), VertexSet::of({3}));
  EXPECT_EQ(c.value, 0);
  EXPECT_EQ(c.side, VertexSet::of({0}));
}

TEST(MaxFlow, RejectsOverlappingTerminals) {
  CompleteGraph g(3);
  EdgeVector<Rational> cap(g.edge_count());
  EXPECT_THROW(max_flow_min_cut(g, cap, VertexSet::of({0, 1}), VertexSet::of({1, 2})), InputError);
}

// The flow value must equal the minimum over all separating cuts, and the
// returned side must be contained in every minimum cut side.
TEST(MaxFlow, AgreesWithCutEnumeration) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 5);
    CompleteGraph g(n);
    EdgeVector<Rational> cap(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e)
      if (rng() % 3 != 0) cap[e] = ratio(static_cast<long>(rng() % 5), 1 + static_cast<long>(rng() % 2));
    const VertexSet S = VertexSet::of({0}), T = VertexSet::of({n - 1});
    const MinCut c = max_flow_min_cut(g, cap, S, T);
    std::optional<Rational> best;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      const VertexSet U(mask);
      if (!S.is_subset_of(U) || !(U & T).empty()) continue;
      const Rational v = cut_value(cap, g, U);
      if (!best || v < *best) best = v;
    }
    EXPECT_EQ(c.value, *best);
    EXPECT_EQ(cut_value(cap, g, c.side), c.value);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      const VertexSet U(mask);
      if (!S.is_subset_of(U) || !(U & T).empty()) continue;
      if (cut_value(cap, g, U) == c.value) EXPECT_TRUE(c.side.is_subset_of(U));
    }
  }
}

TEST(Components, ConnectedPath) {
  Multigraph m(3);
  m.add_edge({0, 1});
  m.add_edge({1, 2});
  EXPECT_EQ(connected_components(m).size(), 1u);
}

TEST(Components, NoEdges) { EXPECT_EQ(connected_components(Multigraph(3)).size(), 3u); }

TEST(Components, OrderedBySmallestMember) {
  Multigraph m(4);
  m.add_edge({0, 1});
  const auto c = connected_components(m);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], VertexSet::of({0, 1}));
  EXPECT_EQ(c[1], VertexSet::of({2}));
  EXPECT_EQ(c[2], VertexSet::of({3}));
}

TEST(Connector, ForcedEdge) {
  const std::vector<VertexSet> comps{VertexSet::of({0}), VertexSet::of({1})};
  EXPECT_EQ(min_spanning_connector(comps, {{{0, 1}, Rational(5)}}), (std::vector<std::size_t>{0}));
}

TEST(Connector, ContractedSpanningTree) {
  const std::vector<VertexSet> comps{VertexSet::of({0}), VertexSet::of({1}), VertexSet::of({2})};
  const std::vector<CandidateEdge> cand{{{0, 1}, Rational(1)}, {{1, 2}, Rational(2)}, {{0, 2}, Rational(3)}};
  EXPECT_EQ(min_spanning_connector(comps, cand), (std::vector<std::size_t>{0, 1}));
}

TEST(Connector, SingleComponent) {
  EXPECT_TRUE(min_spanning_connector({VertexSet::of({0, 1, 2})}, {{{0, 1}, Rational(1)}}).empty());
}

TEST(Connector, Unconnectable) {
  const std::vector<VertexSet> comps{VertexSet::of({0}), VertexSet::of({1}), VertexSet::of({2})};
  EXPECT_THROW(min_spanning_connector(comps, {{{0, 1}, Rational(1)}}), StructureError);
}

TEST(EulerWalk, SimplePath) {
  Multigraph m(3);
  m.add_edge({0, 1});
  m.add_edge({1, 2});
  EXPECT_EQ(eulerian_st_walk(m, 0, 2), (std::vector<Vertex>{0, 1, 2}));
}

TEST(EulerWalk, DoubledEdge) {
  Multigraph m(4);
  m.add_edge({0, 1});
  m.add_edge({1, 2}, 2);
  m.add_edge({1, 3});
  EXPECT_EQ(eulerian_st_walk(m, 0, 3), (std::vector<Vertex>{0, 1, 2, 1, 3}));
}

TEST(EulerWalk, IsolatedSink) {
  Multigraph m(3);
  m.add_edge({0, 1});
  EXPECT_THROW(eulerian_st_walk(m, 0, 2), StructureError);
}

TEST(EulerWalk, DisconnectedEvenPart) {
  Multigraph m(5);
  m.add_edge({0, 1});
  m.add_edge({2, 3});
  m.add_edge({3, 4});
  m.add_edge({2, 4});
  EXPECT_THROW(eulerian_st_walk(m, 0, 1), StructureError);
}

// Random connected multigraphs with odd set {s,t}: every edge copy is used once.
TEST(EulerWalk, UsesEveryEdgeOnce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    Multigraph m(n);
    for (Vertex v = 1; v < n; ++v) m.add_edge({static_cast<Vertex>(rng() % v), v}, 1 + static_cast<int>(rng() % 2));
    for (int k = 0; k < n; ++k) {
      const Vertex a = static_cast<Vertex>(rng() % n), b = static_cast<Vertex>(rng() % n);
      if (a != b) m.add_edge({a, b});
    }
    // Fix parities with a path-like patch: pair up odd vertices other than s,t.
    VertexSet odd = m.odd_vertices() ^ VertexSet::of({0, n - 1});
    auto members = odd.members();
    for (std::size_t i = 0; i + 1 < members.size(); i += 2) m.add_edge({members[i], members[i + 1]});
    ASSERT_EQ(m.odd_vertices(), VertexSet::of({0, n - 1}));
    const auto walk = eulerian_st_walk(m, 0, n - 1);
    ASSERT_EQ(static_cast<int>(walk.size()), m.edge_total() + 1);
    EXPECT_EQ(walk.front(), 0);
    EXPECT_EQ(walk.back(), n - 1);
    std::map<Edge, int> used;
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) ++used[Edge(walk[i], walk[i + 1])];
    EXPECT_EQ(used, m.edges());
  }
}

TEST(Shortcut, RevisitedVertex) {
  const HamiltonianPath p = shortcut({0, 1, 2, 1, 3}, p4());
  EXPECT_EQ(p.order, (std::vector<Vertex>{0, 1, 2, 3}));
  EXPECT_EQ(p.cost, 3);
}

TEST(Shortcut, SimplePathUnchanged) {
  const HamiltonianPath p = shortcut({0, 2, 1, 3}, p4());
  EXPECT_EQ(p.order, (std::vector<Vertex>{0, 2, 1, 3}));
  EXPECT_EQ(p.cost, 2 + 1 + 2);
}

TEST(Shortcut, NeverCostsMore) {
  const MetricInstance inst = p3();
  const std::vector<Vertex> walk{0, 1, 0, 1, 2};
  const HamiltonianPath p = shortcut(walk, inst);
  EXPECT_EQ(inst.walk_cost(walk), 4);
  EXPECT_EQ(p.order, (std::vector<Vertex>{0, 1, 2}));
  EXPECT_EQ(p.cost, 2);
  EXPECT_TRUE(is_hamiltonian_st_path(p.order, inst));
}

TEST(Shortcut, MissingVertex) { EXPECT_THROW(shortcut({0, 1, 3}, p4()), StructureError); }

TEST(Shortcut, RandomWalksOnRandomMetrics) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    CompleteGraph g(n);
    std::vector<Rational> c(g.edge_count());
    for (auto& v : c) v = Rational(1 + static_cast<long>(rng() % 20));
    const MetricInstance inst(n, 0, n - 1, metric_closure(n, c));
    std::vector<Vertex> walk{0};
    for (int k = 0; k < 3 * n; ++k) walk.push_back(static_cast<Vertex>(rng() % n));
    for (Vertex v = 0; v < n; ++v) walk.push_back(v);
    walk.push_back(n - 1);
    const HamiltonianPath p = shortcut(walk, inst);
    EXPECT_TRUE(is_hamiltonian_st_path(p.order, inst));
    EXPECT_LE(p.cost, inst.walk_cost(walk));
  }
}

}  // namespace
}  // namespace pathtsp
