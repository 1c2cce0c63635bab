#pragma once

// JSON reports. Rationals are written as "p/q" strings, floats as JSON numbers
// (shortest round-trip form).

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathtsp/bomc.hpp"
#include "pathtsp/certificates.hpp"
#include "pathtsp/h_function.hpp"
#include "pathtsp/h_optimizer.hpp"
#include "pathtsp/harness/instance_io.hpp"

namespace pathtsp::report {

using nlohmann::json;

inline constexpr const char* kSchema = "pathtsp-report/1";
inline constexpr const char* kToolVersion = "0.1.0";

inline json edge_json(const CompleteGraph& g, EdgeId e) {
  const Edge ed = g.edge(e);
  return json::array({ed.u, ed.v});
}

inline json edges_json(const CompleteGraph& g, const std::vector<EdgeId>& edges) {
  json out = json::array();
  for (EdgeId e : edges) out.push_back(edge_json(g, e));
  return out;
}

inline json trees_json(const MetricInstance& inst, const StructuredDecomposition& dec) {
  json out = json::array();
  for (const WeightedTree& t : dec.trees) {
    out.push_back({{"edges", edges_json(inst.graph(), t.edges)},
                   {"weight", to_string(t.weight)},
                   {"sigma", {to_string(t.sigma_begin), to_string(t.sigma_end)}}});
  }
  return out;
}

inline json certificate_json(const CertificateReport& rep) {
  json j;
  j["h"] = rep.h;
  j["h_integral"] = rep.h_integral;
  j["rho_h"] = rep.rho_h;
  if (rep.rho_h_exact) j["rho_h_exact"] = to_string(*rep.rho_h_exact);
  j["rho_star"] = rep.rho_star;
  if (rep.two_minus_beta) j["two_minus_beta"] = to_string(*rep.two_minus_beta);
  j["vanish"] = rep.vanish;
  j["vanish_ok"] = rep.vanish_ok;
  if (!rep.vanish_error.empty()) j["vanish_error"] = rep.vanish_error;
  j["weighted_average_ratio"] = rep.weighted_average;
  j["weighted_ok"] = rep.weighted_ok;
  j["best_ok"] = rep.best_ok;
  j["membership"] = "sampled";
  json trees = json::array();
  for (const TreeCertificate& t : rep.trees) {
    json samples = json::array();
    for (const SampleCheck& s : t.samples) {
      json sj{{"at", s.label},
              {"beta", s.beta},
              {"y_nonnegative", s.y_nonnegative},
              {"member", s.member},
              {"bound", s.bound},
              {"forest_plus_join_ok", s.forest_plus_join_ok},
              {"tour_ok", s.tour_ok},
              {"weak_duality_ok", s.weak_duality_ok}};
      if (s.sigma >= 0) sj["sigma"] = s.sigma;
      if (std::isfinite(s.min_cut)) {
        sj["min_odd_cut"] = s.min_cut;
        sj["witness"] = s.witness.members();
      }
      samples.push_back(std::move(sj));
    }
    trees.push_back({{"j", t.j},
                     {"q", t.q},
                     {"cj_lhs", to_string(t.cj.lhs)},
                     {"cj_rhs", to_string(t.cj.rhs)},
                     {"cj_ok", t.cj.holds},
                     {"lonely_cuts_odd", t.lonely_cuts_odd},
                     {"samples", std::move(samples)}});
  }
  j["trees"] = std::move(trees);
  json cuts = json::array();
  for (const CutCertificate& c : rep.cuts) cuts.push_back({{"index", c.index}, {"z", to_string(c.z)}, {"v_sum", c.v_sum}, {"support_ok", c.support_ok}, {"cost", c.cost}});
  j["cuts"] = std::move(cuts);
  j["passed"] = rep.passed();
  return j;
}

struct RunMeta {
  std::string source;  ///< file name or generator description
  std::optional<std::uint64_t> seed;
  double seconds = -1;  ///< omitted when negative
  std::optional<bool> oracle_ok;
  json oracle;
};

inline json run_json(const BomcResult& run, const std::vector<CertificateReport>& certs, const RunMeta& meta) {
  const MetricInstance& inst = run.lp.instance;
  const CompleteGraph& g = inst.graph();
  json j;
  j["schema"] = kSchema;
  j["tool_version"] = kToolVersion;
  j["instance"] = {{"source", meta.source}, {"n", inst.size()}, {"s", inst.source()}, {"t", inst.sink()}};
  if (meta.seed) j["seed"] = *meta.seed;

  json x = json::array();
  for (EdgeId e : run.lp.x.support()) x.push_back({{"edge", edge_json(g, e)}, {"value", to_string(run.lp.x[e])}});
  j["lp"] = {{"value", to_string(run.lp.value)}, {"rounds", run.lp.rounds}, {"cuts_added", run.lp.cuts_added.size()}, {"x", std::move(x)}};

  json chain = json::array();
  for (const NarrowCut& c : run.chain.cuts) chain.push_back({{"side", c.cut.side.members()}, {"value", to_string(c.value)}, {"z", to_string(c.z)}});
  j["narrow_cuts"] = std::move(chain);

  j["decomposition"] = {{"trees", run.decomposition.trees.size()},
                        {"base_trees", run.base.size()},
                        {"segments", run.decomposition.segments},
                        {"pivots", run.decomposition.pivots},
                        {"oracle_calls", run.decomposition.oracle_calls},
                        {"backtracks", 0},
                        {"verified", run.decomposition_check.passed()}};

  json rows = json::array();
  for (std::size_t k = 0; k < run.tours.size(); ++k) {
    const TreeTourResult& t = run.tours[k];
    rows.push_back({{"j", k},
                    {"weight", to_string(run.decomposition.trees[k].weight)},
                    {"tree_cost", to_string(t.tree_cost)},
                    {"lonely_cuts", run.contexts[k].lonely.size()},
                    {"parity_set", run.contexts[k].parity.members()},
                    {"forest_cost", to_string(t.forest_cost)},
                    {"join_modified_cost", to_string(t.join.cost)},
                    {"join_cost", to_string(t.join_cost)},
                    {"reconnect_cost", to_string(t.reconnect_cost)},
                    {"tour_cost", to_string(t.tour.cost)}});
  }
  j["trees"] = std::move(rows);
  j["best"] = {{"tree", run.best}, {"tour", run.best_tour().order}, {"cost", to_string(run.best_cost)}, {"ratio", to_string(run.ratio)},
               {"ratio_decimal", run.ratio.get_d()}};
  json cj = json::array();
  for (const CertificateReport& c : certs) cj.push_back(certificate_json(c));
  j["certificates"] = std::move(cj);
  if (meta.oracle_ok) {
    j["oracle"] = meta.oracle;
    j["oracle"]["passed"] = *meta.oracle_ok;
  }
  if (meta.seconds >= 0) j["timings"] = {{"seconds", meta.seconds}};
  return j;
}

inline json h_json(const OptimizedH& r) {
  std::vector<std::string> values;
  for (const Rational& v : r.h.buckets()) values.push_back(to_string(v));
  return {{"schema", "pathtsp-h/1"},
          {"buckets", r.buckets},
          {"zgrid", r.zgrid},
          {"h", values},
          {"integral", to_string(r.objective)},
          {"rho", to_string(r.rho)},
          {"rho_decimal", r.rho.get_d()},
          {"grid_certified", true},
          {"tight_points", r.tight_points},
          {"fine_grid_residual", r.fine_grid_residual},
          {"supremum", r.supremum.value.get_d()},
          {"supremum_at", to_string(r.supremum.argmax)}};
}

/// "default", "const:p/q" or "file:PATH" (an h file written by optimize-h).
inline HFunction parse_h(const std::string& spec) {
  if (spec == "default") return HFunction::default_h();
  if (spec.rfind("const:", 0) == 0) return HFunction::constant(parse_rational(spec.substr(6)));
  if (spec.rfind("file:", 0) == 0) {
    json j;
    try {
      j = json::parse(io::read_file(spec.substr(5)));
      std::vector<Rational> values;
      for (const auto& v : j.at("h")) values.push_back(parse_rational(v.get<std::string>()));
      return HFunction::piecewise(std::move(values));
    } catch (const json::exception& err) {
      throw InputError("bad h file " + spec.substr(5) + ": " + err.what());
    }
  }
  throw InputError("unknown h specification '" + spec + "' (default, const:p/q, file:PATH)");
}

}  // namespace pathtsp::report
