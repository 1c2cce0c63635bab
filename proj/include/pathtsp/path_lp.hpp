#pragma once

// The s-t path LP
//
//   min c(x)  s.t.  x(delta(v)) = 2 (v != s,t),  x(delta(s)) = x(delta(t)) = 1,
//                   x(delta(U)) >= 2  for {} != U subset V \ {s,t},
//                   x(delta(U)) >= 1  for s in U, t not in U,   x >= 0,
//
// solved by cutting planes with exact max-flow separation, and the chain of
// narrow cuts (s-t cuts with x(delta(U)) < 2) of its optimum.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathtsp/core_model.hpp"
#include "pathtsp/errors.hpp"
#include "pathtsp/graph.hpp"
#include "pathtsp/lp.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp {

struct FractionalSolution {
  MetricInstance instance;
  EdgeVector<Rational> x;
  Rational value;
  std::size_t rounds = 0;  ///< LP solves
  std::vector<VertexSet> cuts_added;
};

struct ViolatedCut {
  Cut cut;
  Rational value;  ///< x(delta(U))
  Rational rhs;    ///< 1 for s-t cuts, 2 for cuts avoiding s and t
  bool st_cut = false;

  Rational violation() const { return rhs - value; }
};

namespace detail {

inline bool smaller_side(VertexSet a, VertexSet b) { return a.size() != b.size() ? a.size() < b.size() : a.lex_less(b); }

}  // namespace detail

/// Most violated s-t cut (value < 1), if any.
inline std::optional<ViolatedCut> violated_st_cut(const EdgeVector<Rational>& x, const MetricInstance& inst) {
  const MinCut mc = max_flow_min_cut(inst.graph(), x, VertexSet::of({inst.source()}), VertexSet::of({inst.sink()}));
  if (mc.value >= 1) return std::nullopt;
  return ViolatedCut{Cut{mc.side}, mc.value, Rational(1), true};
}

/// Most violated cut avoiding both s and t (value < 2), if any. One flow per
/// inner vertex v from {v} to {s,t}; ties go to the smaller, then
/// lexicographically smaller side.
inline std::optional<ViolatedCut> violated_inner_cut(const EdgeVector<Rational>& x, const MetricInstance& inst) {
  const VertexSet terminals = VertexSet::of({inst.source(), inst.sink()});
  std::optional<ViolatedCut> best;
  for (Vertex v = 0; v < inst.size(); ++v) {
    if (terminals.contains(v)) continue;
    const MinCut mc = max_flow_min_cut(inst.graph(), x, VertexSet::of({v}), terminals);
    if (mc.value >= 2) continue;
    if (!best || mc.value < best->value || (mc.value == best->value && detail::smaller_side(mc.side, best->cut.side))) {
      best = ViolatedCut{Cut{mc.side}, mc.value, Rational(2), false};
    }
  }
  return best;
}

/// The most violated cut constraint over both families, or none.
inline std::optional<ViolatedCut> find_violated_cut(const EdgeVector<Rational>& x, const MetricInstance& inst) {
  auto a = violated_st_cut(x, inst);
  auto b = violated_inner_cut(x, inst);
  if (!a) return b;
  if (!b) return a;
  return b->violation() > a->violation() ? b : a;
}

/// Solves the path LP exactly. Each round adds the most violated cut of each family.
inline FractionalSolution solve_path_lp(const MetricInstance& inst, std::size_t max_rounds = 10000) {
  const int n = inst.size();
  const CompleteGraph& g = inst.graph();
  lp::Model model;
  for (EdgeId e = 0; e < g.edge_count(); ++e) model.add_variable(inst.cost(e));
  for (Vertex v = 0; v < n; ++v) {
    std::vector<lp::Term> terms;
    for (Vertex w = 0; w < n; ++w)
      if (w != v) terms.push_back({static_cast<std::size_t>(g.id(v, w)), Rational(1)});
    const bool end = v == inst.source() || v == inst.sink();
    model.add_row(std::move(terms), lp::Relation::Equal, Rational(end ? 1 : 2));
  }

  FractionalSolution out{inst, EdgeVector<Rational>(g.edge_count()), Rational(0)};
  for (;;) {
    if (out.rounds >= max_rounds) throw ResourceError("path LP did not converge within " + std::to_string(max_rounds) + " rounds");
    const lp::Outcome res = lp::solve(model);
    ++out.rounds;
    if (res.status != lp::Status::Optimal) throw InvariantError(std::string("path LP reported ") + lp::to_string(res.status));
    out.x = EdgeVector<Rational>(res.primal);
    out.value = res.objective;

    std::vector<ViolatedCut> cuts;
    if (auto c = violated_st_cut(out.x, inst)) cuts.push_back(*c);
    if (auto c = violated_inner_cut(out.x, inst)) cuts.push_back(*c);
    if (cuts.empty()) break;
    for (const ViolatedCut& c : cuts) {
      std::vector<lp::Term> terms;
      for (EdgeId e : c.cut.edges(g)) terms.push_back({static_cast<std::size_t>(e), Rational(1)});
      model.add_row(std::move(terms), lp::Relation::GreaterEqual, c.rhs);
      out.cuts_added.push_back(c.cut.side);
    }
  }
  return out;
}

struct NarrowCut {
  Cut cut;
  Rational value;  ///< x*(C), in [1, 2)
  Rational z;      ///< 2 - x*(C), in (0, 1]
};

/// U_1 subset ... subset U_l, each with x*(delta(U_i)) < 2.
struct NarrowCutChain {
  std::vector<NarrowCut> cuts;

  std::size_t size() const { return cuts.size(); }
  bool empty() const { return cuts.empty(); }
  const NarrowCut& operator[](std::size_t i) const { return cuts[i]; }
};

/// All narrow cuts of an optimal x*. For every ordered pair (u,v) one flow
/// decides whether a cut of value < 2 has u on the s-side and v on the t-side;
/// this relation orders the vertices into blocks, and the narrow cuts are
/// among the block prefixes. A relation that is not a strict weak order means
/// the narrow cuts do not form a chain, which is reported as an invariant error.
inline NarrowCutChain narrow_cuts(const FractionalSolution& xsol) {
  const MetricInstance& inst = xsol.instance;
  const int n = inst.size();
  const Vertex s = inst.source(), t = inst.sink();
  std::vector<std::vector<bool>> before(n, std::vector<bool>(n, false));
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = 0; v < n; ++v) {
      if (u == v || u == t || v == s) continue;
      const MinCut mc = max_flow_min_cut(inst.graph(), xsol.x, VertexSet::of({s, u}), VertexSet::of({t, v}));
      before[u][v] = mc.value < 2;
    }
  }
  // rank(v) = number of vertices strictly before v.
  std::vector<int> rank(n, 0);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = 0; v < n; ++v)
      if (before[u][v]) ++rank[v];
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = 0; v < n; ++v) {
      if (u == v) continue;
      if (before[u][v] && before[v][u]) throw InvariantError("narrow cuts separate " + std::to_string(u) + " and " + std::to_string(v) + " both ways");
      if (before[u][v] != (rank[u] < rank[v])) throw InvariantError("narrow cuts do not form a chain");
    }
  }

  std::vector<int> levels(rank.begin(), rank.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  NarrowCutChain chain;
  for (int level : levels) {
    VertexSet U;
    for (Vertex v = 0; v < n; ++v)
      if (rank[v] <= level) U.insert(v);
    if (!U.contains(s) || U.contains(t)) continue;
    const Rational value = cut_value(xsol.x, inst.graph(), U);
    if (value < 2) chain.cuts.push_back({Cut{U}, value, 2 - value});
  }
  return chain;
}

}  // namespace pathtsp
