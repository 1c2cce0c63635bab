#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "pathtsp/errors.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp {

using Vertex = int;
using EdgeId = int;

/// Largest instance the bitset-based vertex sets support.
inline constexpr int kMaxVertices = 64;

/// Undirected edge, always stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  Edge() = default;
  Edge(Vertex a, Vertex b) : u(std::min(a, b)), v(std::max(a, b)) {}

  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// Subset of the vertex ids 0..63.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::uint64_t bits) : bits_(bits) {}

  static VertexSet of(std::initializer_list<Vertex> vs) {
    VertexSet s;
    for (Vertex v : vs) s.insert(v);
    return s;
  }
  static VertexSet all(int n) { return VertexSet(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1)); }

  bool contains(Vertex v) const { return (bits_ >> v) & 1U; }
  void insert(Vertex v) { bits_ |= std::uint64_t{1} << v; }
  void erase(Vertex v) { bits_ &= ~(std::uint64_t{1} << v); }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  std::uint64_t bits() const { return bits_; }

  std::vector<Vertex> members() const {
    std::vector<Vertex> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  bool is_subset_of(VertexSet other) const { return (bits_ & ~other.bits_) == 0; }
  VertexSet complement(int n) const { return VertexSet(~bits_ & all(n).bits_); }
  VertexSet operator|(VertexSet o) const { return VertexSet(bits_ | o.bits_); }
  VertexSet operator&(VertexSet o) const { return VertexSet(bits_ & o.bits_); }
  VertexSet operator^(VertexSet o) const { return VertexSet(bits_ ^ o.bits_); }

  /// Lexicographic comparison of the sorted member lists.
  bool lex_less(VertexSet o) const { return members() < o.members(); }

  bool operator==(const VertexSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

inline std::string to_string(VertexSet s) {
  std::string out = "{";
  bool first = true;
  for (Vertex v : s.members()) {
    if (!first) out += ",";
    out += std::to_string(v);
    first = false;
  }
  return out + "}";
}

/// Canonical numbering of the edges of the complete graph on n vertices:
/// (0,1), (0,2), ..., (0,n-1), (1,2), ...
class CompleteGraph {
 public:
  explicit CompleteGraph(int n = 0) : n_(n) {}

  int vertex_count() const { return n_; }
  int edge_count() const { return n_ * (n_ - 1) / 2; }

  EdgeId id(Vertex a, Vertex b) const {
    const Vertex u = std::min(a, b);
    const Vertex v = std::max(a, b);
    return u * n_ - u * (u + 1) / 2 + (v - u - 1);
  }
  EdgeId id(Edge e) const { return id(e.u, e.v); }

  Edge edge(EdgeId id) const {
    Vertex u = 0;
    int row = n_ - 1;
    while (id >= row) {
      id -= row;
      ++u;
      --row;
    }
    return Edge(u, u + 1 + id);
  }

  /// Edges with exactly one endpoint in U.
  std::vector<EdgeId> cut_edges(VertexSet U) const {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < edge_count(); ++e) {
      const Edge ed = edge(e);
      if (U.contains(ed.u) != U.contains(ed.v)) out.push_back(e);
    }
    return out;
  }

  bool crosses(EdgeId e, VertexSet U) const {
    const Edge ed = edge(e);
    return U.contains(ed.u) != U.contains(ed.v);
  }

 private:
  int n_;
};

/// A finite metric space on vertices 0..n-1 with designated endpoints s and t.
/// Costs are stored per edge of the complete graph in canonical order.
class MetricInstance {
 public:
  MetricInstance() = default;
  MetricInstance(int n, Vertex s, Vertex t, std::vector<Rational> costs) : graph_(n), s_(s), t_(t), costs_(std::move(costs)) {
    if (n < 2) throw InputError("instance needs at least 2 vertices, got " + std::to_string(n));
    if (n > kMaxVertices) throw ResourceError("instance has " + std::to_string(n) + " vertices; limit is 64");
    if (s < 0 || s >= n || t < 0 || t >= n) throw InputError("endpoint out of range");
    if (static_cast<int>(costs_.size()) != graph_.edge_count()) {
      throw InputError("expected " + std::to_string(graph_.edge_count()) + " costs, got " + std::to_string(costs_.size()));
    }
  }

  int size() const { return graph_.vertex_count(); }
  int edge_count() const { return graph_.edge_count(); }
  Vertex source() const { return s_; }
  Vertex sink() const { return t_; }
  const CompleteGraph& graph() const { return graph_; }

  const Rational& cost(EdgeId e) const { return costs_[e]; }
  const Rational& cost(Vertex a, Vertex b) const { return costs_[graph_.id(a, b)]; }
  const std::vector<Rational>& costs() const { return costs_; }

  Rational cost_of(const std::vector<EdgeId>& edges) const {
    Rational total = 0;
    for (EdgeId e : edges) total += costs_[e];
    return total;
  }

  /// Cost of a vertex sequence read as a walk; staying at a vertex costs nothing.
  Rational walk_cost(const std::vector<Vertex>& walk) const {
    Rational total = 0;
    for (Vertex v : walk)
      if (v < 0 || v >= size()) throw InputError("walk vertex " + std::to_string(v) + " out of range");
    for (std::size_t i = 1; i < walk.size(); ++i)
      if (walk[i - 1] != walk[i]) total += cost(walk[i - 1], walk[i]);
    return total;
  }

 private:
  CompleteGraph graph_;
  Vertex s_ = 0;
  Vertex t_ = 1;
  std::vector<Rational> costs_;
};

/// A value per edge of the complete graph (LP solutions, parity vectors, v^C vectors).
template <typename Num>
class EdgeVector {
 public:
  EdgeVector() = default;
  explicit EdgeVector(int edge_count) : values_(edge_count, Num(0)) {}
  explicit EdgeVector(std::vector<Num> values) : values_(std::move(values)) {}

  int size() const { return static_cast<int>(values_.size()); }
  Num& operator[](EdgeId e) { return values_[e]; }
  const Num& operator[](EdgeId e) const { return values_[e]; }
  const std::vector<Num>& values() const { return values_; }

  Num sum(const std::vector<EdgeId>& edges) const {
    Num total(0);
    for (EdgeId e : edges) total += values_[e];
    return total;
  }

  /// c(x) = sum_e c(e) x(e).
  Num cost_under(const MetricInstance& inst) const {
    Num total(0);
    for (EdgeId e = 0; e < size(); ++e) total += from_rational<Num>(inst.cost(e)) * values_[e];
    return total;
  }

  std::vector<EdgeId> support() const {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < size(); ++e)
      if (values_[e] != 0) out.push_back(e);
    return out;
  }

  bool operator==(const EdgeVector&) const = default;

 private:
  std::vector<Num> values_;
};

/// The cut delta(U) given by its vertex side U.
struct Cut {
  VertexSet side;

  std::vector<EdgeId> edges(const CompleteGraph& g) const { return g.cut_edges(side); }
  bool contains(const CompleteGraph& g, EdgeId e) const { return g.crosses(e, side); }
  bool operator==(const Cut&) const = default;
};

/// x(delta(U)); rejects U = {} and U = V.
template <typename Num>
Num cut_value(const EdgeVector<Num>& x, const CompleteGraph& g, VertexSet U) {
  if (U.empty() || U == VertexSet::all(g.vertex_count())) throw InputError("cut side must be a proper nonempty subset");
  Num total(0);
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (g.crosses(e, U)) total += x[e];
  return total;
}

/// Edge multiset on vertices 0..n-1.
class Multigraph {
 public:
  explicit Multigraph(int n = 0) : n_(n), degree_(n, 0) {}

  int vertex_count() const { return n_; }

  void add_edge(Edge e, int multiplicity = 1) {
    if (multiplicity < 1) throw InputError("edge multiplicity must be >= 1");
    if (e.u == e.v || e.u < 0 || e.v >= n_) throw InputError("bad edge");
    mult_[e] += multiplicity;
    degree_[e.u] += multiplicity;
    degree_[e.v] += multiplicity;
  }

  int degree(Vertex v) const { return degree_[v]; }
  int multiplicity(Edge e) const {
    auto it = mult_.find(e);
    return it == mult_.end() ? 0 : it->second;
  }
  const std::map<Edge, int>& edges() const { return mult_; }

  int edge_total() const {
    int total = 0;
    for (const auto& [e, m] : mult_) total += m;
    return total;
  }

  VertexSet odd_vertices() const {
    VertexSet out;
    for (Vertex v = 0; v < n_; ++v)
      if (degree_[v] % 2 != 0) out.insert(v);
    return out;
  }

  Rational cost(const MetricInstance& inst) const {
    Rational total = 0;
    for (const auto& [e, m] : mult_) total += inst.cost(e.u, e.v) * m;
    return total;
  }

 private:
  int n_;
  std::vector<int> degree_;
  std::map<Edge, int> mult_;
};

/// One entry of validate_metric's output.
struct MetricViolation {
  enum class Kind { Endpoints, Negative, Triangle };
  Kind kind;
  std::vector<Vertex> where;
  std::string message;
};

/// Checks s != t, nonnegativity and every triangle inequality. Empty result = valid.
/// Symmetry holds by construction since costs are stored per unordered pair.
inline std::vector<MetricViolation> validate_metric(const MetricInstance& inst) {
  std::vector<MetricViolation> out;
  const int n = inst.size();
  if (inst.source() == inst.sink()) {
    out.push_back({MetricViolation::Kind::Endpoints, {inst.source()}, "s and t coincide (" + std::to_string(inst.source()) + ")"});
  }
  for (EdgeId e = 0; e < inst.edge_count(); ++e) {
    if (inst.cost(e) < 0) {
      const Edge ed = inst.graph().edge(e);
      out.push_back({MetricViolation::Kind::Negative, {ed.u, ed.v},
                     "negative cost c(" + std::to_string(ed.u) + "," + std::to_string(ed.v) + ") = " + to_string(inst.cost(e))});
    }
  }
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex w = u + 1; w < n; ++w) {
      for (Vertex v = 0; v < n; ++v) {
        if (v == u || v == w) continue;
        if (inst.cost(u, w) > inst.cost(u, v) + inst.cost(v, w)) {
          out.push_back({MetricViolation::Kind::Triangle, {u, v, w},
                         "triangle violated: c(" + std::to_string(u) + "," + std::to_string(w) + ") > c(" + std::to_string(u) + "," +
                             std::to_string(v) + ") + c(" + std::to_string(v) + "," + std::to_string(w) + ")"});
        }
      }
    }
  }
  return out;
}

/// Shortest-path closure of a nonnegative cost table; the result satisfies the triangle inequality.
inline std::vector<Rational> metric_closure(int n, const std::vector<Rational>& costs) {
  CompleteGraph g(n);
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n, 0));
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) d[u][v] = d[v][u] = costs[g.id(u, v)];
  for (Vertex k = 0; k < n; ++k)
    for (Vertex i = 0; i < n; ++i)
      for (Vertex j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  std::vector<Rational> out(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge ed = g.edge(e);
    out[e] = d[ed.u][ed.v];
  }
  return out;
}

}  // namespace pathtsp
