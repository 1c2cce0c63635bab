// Command-line front end.
//
// Exit codes: 0 all checks passed, 1 a bound or membership check failed,
// 2 input error, 3 resource or search limit.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pathtsp/bomc.hpp"
#include "pathtsp/certificates.hpp"
#include "pathtsp/h_optimizer.hpp"
#include "pathtsp/harness/generators.hpp"
#include "pathtsp/harness/instance_io.hpp"
#include "pathtsp/harness/oracles.hpp"
#include "pathtsp/harness/report.hpp"

namespace {

using namespace pathtsp;
using report::json;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;
constexpr int kResourceError = 3;

struct InstanceArgs {
  std::string path;
  std::optional<int> source, sink;

  MetricInstance load() const {
    io::Endpoints ep;
    if (source) ep.s = *source;
    if (sink) ep.t = *sink;
    return io::load_instance(path, ep);
  }
};

void add_instance_args(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("instance", a.path, "instance file (native, TSPLIB or JSON)")->required();
  cmd->add_option("--source", a.source, "0-based id of s");
  cmd->add_option("--sink", a.sink, "0-based id of t");
}

/// Oracle cross-checks: sandwich against the brute-force path, narrow cuts against
/// enumeration, minimum T-joins against Dijkstra plus matching enumeration.
json oracle_checks(const BomcResult& run, bool& ok) {
  const MetricInstance& inst = run.lp.instance;
  json j;
  ok = true;
  if (inst.size() <= oracle::kMaxBruteForcePath) {
    const Rational opt = oracle::brute_force_path(inst);
    const bool sandwich = run.lp.value <= opt && opt <= run.best_cost;
    j["optimal_path"] = to_string(opt);
    j["sandwich_ok"] = sandwich;
    ok &= sandwich;
  }
  if (inst.size() <= oracle::kMaxCutEnumeration) {
    std::vector<VertexSet> mine;
    for (const NarrowCut& c : run.chain.cuts) mine.push_back(c.cut.side);
    auto theirs = oracle::oracle_narrow_cuts(run.lp.x, inst);
    auto key = [](VertexSet a, VertexSet b) { return a.bits() < b.bits(); };
    std::sort(mine.begin(), mine.end(), key);
    std::sort(theirs.begin(), theirs.end(), key);
    j["narrow_cuts_ok"] = mine == theirs;
    ok &= mine == theirs;
  }
  std::size_t compared = 0;
  bool tj = true;
  for (std::size_t k = 0; k < run.tours.size(); ++k) {
    if (run.contexts[k].parity.size() > oracle::kMaxTJoinTerminals) continue;
    ++compared;
    tj &= oracle::min_tjoin_cost(inst, run.contexts[k].modified_cost, run.contexts[k].parity) == run.tours[k].join.cost;
  }
  j["tjoins_compared"] = compared;
  j["tjoins_ok"] = tj;
  ok &= tj;
  return j;
}

int run_solve(const InstanceArgs& ia, const std::vector<std::string>& hs, const std::string& report_path, bool with_oracle,
              const std::string& trees_out, bool verbose_certificates) {
  const auto t0 = std::chrono::steady_clock::now();
  const MetricInstance inst = ia.load();
  const BomcResult run = best_of_many(inst);

  std::vector<CertificateReport> certs;
  bool ok = run.decomposition_check.passed();
  for (const std::string& spec : hs) {
    certs.push_back(aggregate_certificate(run, report::parse_h(spec)));
    ok &= certs.back().passed();
  }
  const double rho = rho_star();
  const double ratio = run.ratio.get_d();
  const bool bound_ok = ratio <= rho * (1 + 1e-9) && ratio < 1.5284;
  ok &= bound_ok;

  report::RunMeta meta;
  meta.source = ia.path;
  if (with_oracle) {
    bool oracle_ok = true;
    meta.oracle = oracle_checks(run, oracle_ok);
    meta.oracle_ok = oracle_ok;
    ok &= oracle_ok;
  }
  meta.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::printf("n=%d  LP=%s  best=%s (tree %zu)  ratio=%.9f  bound=%.9f  %s\n", inst.size(), to_string(run.lp.value).c_str(),
              to_string(run.best_cost).c_str(), run.best, ratio, rho, bound_ok ? "ok" : "VIOLATED");
  std::printf("narrow cuts=%zu  trees=%zu  decomposition %s\n", run.chain.size(), run.decomposition.trees.size(),
              run.decomposition_check.passed() ? "verified" : "FAILED");
  for (const CertificateReport& c : certs) {
    std::printf("h=%s  rho(h)=%.9f  vanish=%.6g  %s\n", c.h.c_str(), c.rho_h, c.vanish, c.passed() ? "certified" : "FAILED");
    if (verbose_certificates && !c.vanish_error.empty()) std::printf("  %s\n", c.vanish_error.c_str());
  }
  if (meta.oracle_ok) std::printf("oracle checks %s\n", *meta.oracle_ok ? "agree" : "DISAGREE");

  if (!report_path.empty()) io::write_file(report_path, report::run_json(run, certs, meta).dump(2) + "\n");
  if (!trees_out.empty()) io::write_file(trees_out, report::trees_json(inst, run.decomposition).dump(2) + "\n");
  return ok ? kOk : kCheckFailed;
}

int run_optimize(int m, int k, const std::string& out) {
  const OptimizedH r = optimize_h(m, k);
  std::printf("buckets=%d zgrid=%d  int h=%.12f  rho=%.12f  fine-grid residual=%.3g  sup=%.3g\n", m, k, r.objective.get_d(), r.rho.get_d(),
              r.fine_grid_residual, r.supremum.value.get_d());
  if (!out.empty()) io::write_file(out, report::h_json(r).dump(1) + "\n");
  return kOk;
}

int run_gen(int n, std::uint64_t seed, const std::string& mode, const std::string& out, const std::string& format) {
  const MetricInstance inst = gen::gen_instance(n, seed, gen::parse_mode(mode));
  std::string text;
  if (format == "native") text = io::write_native(inst);
  else if (format == "json") text = io::write_json(inst);
  else throw InputError("unknown output format '" + format + "' (native, json)");
  if (out.empty()) std::cout << text;
  else io::write_file(out, text);
  return kOk;
}

int run_validate(const InstanceArgs& ia) {
  const std::string text = io::read_file(ia.path);
  io::Endpoints ep;
  if (ia.source) ep.s = *ia.source;
  if (ia.sink) ep.t = *ia.sink;
  MetricInstance inst;
  switch (io::detect_format(text)) {
    case io::Format::Native: inst = io::parse_native(text, ep); break;
    case io::Format::Json: inst = io::parse_json(text, ep); break;
    case io::Format::Tsplib: inst = io::parse_tsplib(text, ep); break;
  }
  const auto bad = validate_metric(inst);
  for (const auto& v : bad) std::printf("%s\n", v.message.c_str());
  if (bad.empty()) std::printf("valid: n=%d s=%d t=%d\n", inst.size(), inst.source(), inst.sink());
  return bad.empty() ? kOk : kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"s-t path TSP: best-of-many Christofides with lonely edge deletion, plus certificates"};
  app.require_subcommand(1);

  InstanceArgs solve_args, certify_args, validate_args;
  std::string report_path, trees_out, h_spec = "default";
  bool with_oracle = false;
  auto* solve = app.add_subcommand("solve", "solve an instance and check the ratio bound");
  add_instance_args(solve, solve_args);
  solve->set_help_flag("--help", "print this help message and exit");
  solve->add_option("--h", h_spec, "weight function: default, const:p/q or file:PATH");
  solve->add_option("--report", report_path, "write a JSON report");
  solve->add_option("--trees-out", trees_out, "write the structured decomposition");
  solve->add_flag("--oracle", with_oracle, "cross-check against brute-force oracles");

  std::vector<std::string> certify_hs;
  std::string certify_report, certify_trees;
  bool certify_oracle = false;
  auto* certify = app.add_subcommand("certify", "run every instance-level certificate for one or more h");
  add_instance_args(certify, certify_args);
  certify->set_help_flag("--help", "print this help message and exit");
  certify->add_option("--h", certify_hs, "weight function(s); default: default and const:8/9");
  certify->add_option("--report", certify_report, "write a JSON report");
  certify->add_option("--trees-out", certify_trees, "write the structured decomposition");
  certify->add_flag("--oracle", certify_oracle, "cross-check against brute-force oracles");

  int buckets = 200, zgrid = 400;
  std::string h_out;
  auto* opt = app.add_subcommand("optimize-h", "optimize a piecewise-constant h by LP");
  opt->add_option("--buckets", buckets, "number of uniform buckets m")->check(CLI::PositiveNumber);
  opt->add_option("--zgrid", zgrid, "z-grid resolution k")->check(CLI::PositiveNumber);
  opt->add_option("--out", h_out, "write the h file");

  int gen_n = 8;
  std::uint64_t seed = 0;
  std::string mode = "euclidean", gen_out, format = "native";
  auto* gen = app.add_subcommand("gen", "generate a seeded instance");
  gen->add_option("--n", gen_n, "number of vertices")->required();
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--mode", mode, "euclidean or random-metric");
  gen->add_option("--format", format, "native or json");
  gen->add_option("--out", gen_out, "output file (stdout when omitted)");

  auto* validate = app.add_subcommand("validate", "check an instance for metricity");
  add_instance_args(validate, validate_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*solve) return run_solve(solve_args, {h_spec}, report_path, with_oracle, trees_out, false);
    if (*certify) {
      if (certify_hs.empty()) certify_hs = {"default", "const:8/9"};
      return run_solve(certify_args, certify_hs, certify_report, certify_oracle, certify_trees, true);
    }
    if (*opt) return run_optimize(buckets, zgrid, h_out);
    if (*gen) return run_gen(gen_n, seed, mode, gen_out, format);
    if (*validate) return run_validate(validate_args);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInputError;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "limit reached: %s\n", e.what());
    return kResourceError;
  } catch (const Error& e) {
    std::fprintf(stderr, "check failed: %s\n", e.what());
    return kCheckFailed;
  }
  return kInputError;
}
