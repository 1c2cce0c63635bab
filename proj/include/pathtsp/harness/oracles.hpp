#pragma once

// Exhaustive reference computations for small instances. They share no code
// with the algorithms they are compared against beyond the instance types.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "pathtsp/core_model.hpp"
#include "pathtsp/errors.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp::oracle {

inline constexpr int kMaxBruteForcePath = 11;
inline constexpr int kMaxCutEnumeration = 16;
inline constexpr int kMaxTJoinTerminals = 10;

/// Optimal s-t Hamiltonian path cost by enumerating the orders of the inner vertices.
inline Rational brute_force_path(const MetricInstance& inst) {
  const int n = inst.size();
  if (n > kMaxBruteForcePath) throw ResourceError("brute-force path limited to n <= " + std::to_string(kMaxBruteForcePath));
  std::vector<Vertex> inner;
  for (Vertex v = 0; v < n; ++v)
    if (v != inst.source() && v != inst.sink()) inner.push_back(v);
  std::optional<Rational> best;
  do {
    Rational c = 0;
    Vertex prev = inst.source();
    for (Vertex v : inner) {
      c += inst.cost(prev, v);
      prev = v;
    }
    c += inst.cost(prev, inst.sink());
    if (!best || c < *best) best = c;
  } while (std::next_permutation(inner.begin(), inner.end()));
  return *best;
}

/// Every s-t cut side U with x(delta(U)) < 2, ordered by size, then lexicographically.
inline std::vector<VertexSet> oracle_narrow_cuts(const EdgeVector<Rational>& x, const MetricInstance& inst) {
  const int n = inst.size();
  if (n > kMaxCutEnumeration) throw ResourceError("cut enumeration limited to n <= " + std::to_string(kMaxCutEnumeration));
  std::vector<Vertex> inner;
  for (Vertex v = 0; v < n; ++v)
    if (v != inst.source() && v != inst.sink()) inner.push_back(v);
  std::vector<VertexSet> out;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << inner.size()); ++mask) {
    VertexSet U = VertexSet::of({inst.source()});
    for (std::size_t i = 0; i < inner.size(); ++i)
      if ((mask >> i) & 1U) U.insert(inner[i]);
    Rational value = 0;
    for (Vertex u : U.members())
      for (Vertex v = 0; v < n; ++v)
        if (!U.contains(v)) value += x[inst.graph().id(u, v)];
    if (value < 2) out.push_back(U);
  }
  std::sort(out.begin(), out.end(), [](VertexSet a, VertexSet b) { return a.size() != b.size() ? a.size() < b.size() : a.lex_less(b); });
  return out;
}

/// Minimum T-join cost: Dijkstra from every terminal, then the cheapest of all
/// perfect matchings of T, enumerated recursively.
inline Rational min_tjoin_cost(const MetricInstance& inst, const EdgeVector<Rational>& cost, VertexSet T) {
  const int n = inst.size();
  const std::vector<Vertex> term = T.members();
  const int k = static_cast<int>(term.size());
  if (k % 2 != 0) throw InputError("|T| must be even");
  if (k > kMaxTJoinTerminals) throw ResourceError("T-join oracle limited to |T| <= " + std::to_string(kMaxTJoinTerminals));
  if (k == 0) return Rational(0);

  std::vector<std::vector<Rational>> dist(k, std::vector<Rational>(n));
  for (int a = 0; a < k; ++a) {
    std::vector<bool> done(n, false), reached(n, false);
    std::vector<Rational>& d = dist[a];
    d[term[a]] = 0;
    reached[term[a]] = true;
    for (int round = 0; round < n; ++round) {
      Vertex u = -1;
      for (Vertex v = 0; v < n; ++v)
        if (reached[v] && !done[v] && (u < 0 || d[v] < d[u])) u = v;
      if (u < 0) break;
      done[u] = true;
      for (Vertex v = 0; v < n; ++v) {
        if (v == u || done[v]) continue;
        const Rational via = d[u] + cost[inst.graph().id(u, v)];
        if (!reached[v] || via < d[v]) {
          d[v] = via;
          reached[v] = true;
        }
      }
    }
  }

  std::vector<bool> used(k, false);
  std::optional<Rational> best;
  auto rec = [&](auto&& self, Rational acc) -> void {
    int a = 0;
    while (a < k && used[a]) ++a;
    if (a == k) {
      if (!best || acc < *best) best = acc;
      return;
    }
    used[a] = true;
    for (int b = a + 1; b < k; ++b) {
      if (used[b]) continue;
      used[b] = true;
      self(self, acc + dist[a][term[b]]);
      used[b] = false;
    }
    used[a] = false;
  };
  rec(rec, Rational(0));
  return *best;
}

}  // namespace pathtsp::oracle
