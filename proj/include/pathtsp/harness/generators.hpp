#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pathtsp/core_model.hpp"
#include "pathtsp/errors.hpp"
#include "pathtsp/harness/instance_io.hpp"

namespace pathtsp::gen {

enum class Mode { Euclidean, RandomMetric };

inline Mode parse_mode(const std::string& s) {
  if (s == "euclidean") return Mode::Euclidean;
  if (s == "random-metric" || s == "m" || s == "metric") return Mode::RandomMetric;
  throw InputError("unknown generator mode '" + s + "' (euclidean, random-metric)");
}

inline const char* to_string(Mode m) { return m == Mode::Euclidean ? "euclidean" : "random-metric"; }

/// Deterministic for (n, seed, mode). mt19937_64 is fully specified, and values
/// are reduced by modulo rather than a distribution object, whose output the
/// standard leaves to the implementation.
inline MetricInstance gen_instance(int n, std::uint64_t seed, Mode mode) {
  if (n < 2) throw InputError("generator needs n >= 2");
  if (n > kMaxVertices) throw ResourceError("generator limited to n <= 64");
  std::mt19937_64 rng(seed);
  std::vector<Rational> costs;
  if (mode == Mode::Euclidean) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < n; ++i) {
      const auto x = static_cast<double>(rng() % 1000001);
      const auto y = static_cast<double>(rng() % 1000001);
      pts.push_back({x, y});
    }
    costs = io::detail::euclidean_costs(pts);
  } else {
    for (int e = 0; e < n * (n - 1) / 2; ++e) costs.emplace_back(static_cast<long>(1 + rng() % 100));
    costs = metric_closure(n, costs);
  }
  // Endpoints: a farthest pair, smallest ids first.
  CompleteGraph g(n);
  EdgeId best = 0;
  for (EdgeId e = 1; e < g.edge_count(); ++e)
    if (costs[e] > costs[best]) best = e;
  const Edge st = g.edge(best);
  return MetricInstance(n, st.u, st.v, std::move(costs));
}

}  // namespace pathtsp::gen
