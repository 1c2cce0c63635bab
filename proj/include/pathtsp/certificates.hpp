#pragma once

// Per-instance certificates for the best-of-many tour bound.
//
// A tree S_j owns the sigma-interval [a_j, b_j). At sigma the analysis uses
// beta = h/(1+h), alpha = 1 - 2 beta and the parity correction vector
//
//   y = beta x* + alpha chi(S_j) + sum_{C lonely} beta z_C chi(S_j cap C)
//       + sum_{C narrow, not lonely} max{0, beta z_C - alpha} v^C,
//
// where v^C spreads one unit over the lonely edges at C with weights
// int (1 - h + z_C h) over each prefix tree. The primitives take the number
// type as a template parameter: Rational for constant and piecewise h, where
// every quantity is rational, double for the closed-form h.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "pathtsp/bomc.hpp"
#include "pathtsp/core_model.hpp"
#include "pathtsp/errors.hpp"
#include "pathtsp/h_function.hpp"
#include "pathtsp/path_lp.hpp"
#include "pathtsp/rational.hpp"
#include "pathtsp/tree_decomp.hpp"

namespace pathtsp {

/// Largest n for exhaustive odd-cut enumeration.
inline constexpr int kMaxEnumeration = 16;

struct CertificateTolerances {
  double comparison = 1e-9;
  double aggregate = 1e-6;
  double normalization = 1e-12;
  double condition = 1e-12;  ///< f_h(z) <= this counts as satisfied for the closed-form h
};

namespace detail {

template <typename Num>
Num h_integral_between(const HFunction& h, const Rational& a, const Rational& b) {
  if constexpr (std::is_same_v<Num, Rational>) {
    return h.integral_exact(a, b);
  } else {
    return h.integral(a.get_d(), b.get_d());
  }
}

template <typename Num>
Num positive_part(const Num& v) {
  return v > Num(0) ? v : Num(0);
}

template <typename Num>
double as_double(const Num& v) {
  if constexpr (std::is_same_v<Num, Rational>) {
    return v.get_d();
  } else {
    return v;
  }
}

}  // namespace detail

/// Unit vector over the lonely edges at narrow cut `ci`, weighted by
/// int_{a_j}^{b_j} (1 - h + z h) for the prefix trees j.
template <typename Num>
EdgeVector<Num> build_vC(const StructuredDecomposition& dec, const NarrowCutChain& chain, std::size_t ci, const HFunction& h,
                         const MetricInstance& inst) {
  const CompleteGraph& g = inst.graph();
  const Rational& z = chain[ci].z;
  if (sgn(z) <= 0) throw InputError("v^C needs a narrow cut (z > 0)");
  EdgeVector<Num> v(g.edge_count());
  Num total(0);
  const Num zn = from_rational<Num>(z);
  for (const WeightedTree& t : dec.trees) {
    if (t.sigma_end > z) break;
    const auto in_cut = tree_edges_in_cut(g, t.edges, chain[ci].cut.side);
    if (in_cut.size() != 1) throw PreconditionError("prefix tree crosses narrow cut " + std::to_string(ci) + " more than once");
    const Num w = from_rational<Num>(t.weight) - (1 - zn) * detail::h_integral_between<Num>(h, t.sigma_begin, t.sigma_end);
    v[in_cut[0]] += w;
    total += w;
  }
  if (!(total > Num(0))) throw InvariantError("v^C normalization is not positive");
  for (EdgeId e = 0; e < g.edge_count(); ++e) v[e] /= total;
  return v;
}

template <typename Num>
std::vector<EdgeVector<Num>> build_all_vC(const StructuredDecomposition& dec, const NarrowCutChain& chain, const HFunction& h,
                                          const MetricInstance& inst) {
  std::vector<EdgeVector<Num>> out;
  for (std::size_t i = 0; i < chain.size(); ++i) out.push_back(build_vC<Num>(dec, chain, i, h, inst));
  return out;
}

template <typename Num>
EdgeVector<Num> build_parity_vector(const TreeContext& ctx, const NarrowCutChain& chain, const FractionalSolution& xsol, const Num& beta,
                                    const std::vector<EdgeVector<Num>>& vCs) {
  if (beta < Num(0) || beta > Num(1) / 2) throw InputError("beta must lie in [0, 1/2]");
  if (vCs.size() != chain.size()) throw InputError("missing v^C vectors");
  const CompleteGraph& g = xsol.instance.graph();
  const Num alpha = 1 - 2 * beta;
  EdgeVector<Num> y(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) y[e] = beta * from_rational<Num>(xsol.x[e]);
  for (EdgeId e : ctx.tree) y[e] += alpha;
  std::vector<bool> lonely(chain.size(), false);
  for (const LonelyCut& l : ctx.lonely) {
    lonely[l.cut] = true;
    y[l.edge] += beta * from_rational<Num>(chain[l.cut].z);
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (lonely[i]) continue;
    const Num coef = detail::positive_part<Num>(beta * from_rational<Num>(chain[i].z) - alpha);
    if (coef == Num(0)) continue;
    if (vCs[i].size() != g.edge_count()) throw InputError("v^C vector has the wrong length");
    for (EdgeId e = 0; e < g.edge_count(); ++e) y[e] += coef * vCs[i][e];
  }
  return y;
}

template <typename Num>
struct PolyhedronCheck {
  bool member = true;
  std::optional<Num> min_value;  ///< min y(delta(U)) over odd U; empty when T is empty
  VertexSet witness;
};

/// y(delta(U)) >= 1 - tol for every U with |U cap T| odd, by enumerating all U containing s.
template <typename Num>
PolyhedronCheck<Num> check_tjoin_polyhedron(const EdgeVector<Num>& y, VertexSet T, const MetricInstance& inst, double tol = 1e-9) {
  const int n = inst.size();
  const CompleteGraph& g = inst.graph();
  if (T.size() % 2 != 0) throw InputError("T must have even size");
  if (n > kMaxEnumeration) throw ResourceError("odd-cut enumeration is limited to n <= " + std::to_string(kMaxEnumeration));
  PolyhedronCheck<Num> out;
  if (T.empty()) return out;
  const Vertex s = inst.source();
  std::vector<Vertex> rest;
  for (Vertex v = 0; v < n; ++v)
    if (v != s) rest.push_back(v);
  const std::uint32_t count = std::uint32_t{1} << rest.size();
  // Gray-code walk over subsets of rest; U = {s} + chosen.
  VertexSet U = VertexSet::of({s});
  Num value(0);
  for (Vertex w = 0; w < n; ++w)
    if (w != s) value += y[g.id(s, w)];
  for (std::uint32_t step = 0;; ++step) {
    if ((U & T).size() % 2 == 1 && U.size() < n) {
      if (!out.min_value || value < *out.min_value || (value == *out.min_value && U.lex_less(out.witness))) {
        out.min_value = value;
        out.witness = U;
      }
    }
    if (step + 1 == count) break;
    const Vertex v = rest[std::countr_zero(step + 1)];
    const bool inside = U.contains(v);
    for (Vertex w = 0; w < n; ++w) {
      if (w == v) continue;
      const Num& ye = y[g.id(v, w)];
      // Edge vw crosses before the flip iff membership differs.
      if (U.contains(w) != inside) value -= ye;
      else value += ye;
    }
    if (inside) U.erase(v);
    else U.insert(v);
  }
  out.member = !out.min_value || detail::as_double(*out.min_value) >= 1.0 - tol;
  return out;
}

template <typename Num>
struct TreeBound {
  Num bound{};
  Num forest_plus_join{};  ///< c(F_j) + c^j(J_j)
  Rational tour;
  bool forest_plus_join_ok = false;
  bool tour_ok = false;
};

/// Upper bound on the tour cost of tree j at the given beta:
/// (1+alpha) c(S_j) + beta c(x*) - sum_{C lonely} (alpha + beta z_C) c(S_j cap C)
///   + sum_{C not lonely} max{0, beta z_C - alpha} c(v^C).
template <typename Num>
TreeBound<Num> per_tree_bound(const TreeContext& ctx, const TreeTourResult& tour, const NarrowCutChain& chain, const FractionalSolution& xsol,
                              const Num& beta, const std::vector<EdgeVector<Num>>& vCs, double tol = 1e-9) {
  const MetricInstance& inst = xsol.instance;
  const Num alpha = 1 - 2 * beta;
  TreeBound<Num> out;
  out.bound = (1 + alpha) * from_rational<Num>(inst.cost_of(ctx.tree)) + beta * from_rational<Num>(xsol.value);
  std::vector<bool> lonely(chain.size(), false);
  for (const LonelyCut& l : ctx.lonely) {
    lonely[l.cut] = true;
    out.bound -= (alpha + beta * from_rational<Num>(chain[l.cut].z)) * from_rational<Num>(inst.cost(l.edge));
  }
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (lonely[i]) continue;
    const Num coef = detail::positive_part<Num>(beta * from_rational<Num>(chain[i].z) - alpha);
    if (coef == Num(0)) continue;
    out.bound += coef * vCs[i].cost_under(inst);
  }
  out.forest_plus_join = from_rational<Num>(tour.forest_cost + tour.join.cost);
  out.tour = tour.tour.cost;
  const double slack = tol * std::max(1.0, std::abs(detail::as_double(out.bound)));
  out.forest_plus_join_ok = detail::as_double(Num(out.forest_plus_join - out.bound)) <= slack;
  out.tour_ok = detail::as_double(Num(from_rational<Num>(out.tour) - out.bound)) <= slack;
  return out;
}

struct CjInequality {
  Rational lhs;  ///< c^j(x*)
  Rational rhs;  ///< c(x*) + sum_{C lonely} 2 (x*(C) - 1) c(S_j cap C)
  bool holds = false;
};

inline CjInequality check_cj_inequality(const TreeContext& ctx, const NarrowCutChain& chain, const FractionalSolution& xsol) {
  CjInequality out;
  out.lhs = 0;
  for (EdgeId e = 0; e < xsol.x.size(); ++e) out.lhs += ctx.modified_cost[e] * xsol.x[e];
  out.rhs = xsol.value;
  for (const LonelyCut& l : ctx.lonely) out.rhs += 2 * (chain[l.cut].value - 1) * xsol.instance.cost(l.edge);
  out.holds = out.lhs <= out.rhs;
  return out;
}

/// f_h at every narrow-cut z of the instance; throws PreconditionError if one is positive.
template <typename Num>
void require_condition_at_cuts(const NarrowCutChain& chain, const HFunction& h, double tol = 1e-12) {
  for (const NarrowCut& c : chain.cuts) {
    if constexpr (std::is_same_v<Num, Rational>) {
      const Rational f = eval_condition_exact(h, c.z);
      if (sgn(f) > 0) throw PreconditionError("h violates the condition at z = " + to_string(c.z) + " (f = " + to_string(f) + ")");
    } else {
      const double f = eval_condition(h, c.z.get_d());
      if (f > tol) throw PreconditionError("h violates the condition at z = " + to_string(c.z) + " (f = " + std::to_string(f) + ")");
    }
  }
}

/// sum_C [ -int_0^z (1-h+zh) c(S_sigma cap C) + c(v^C) int_z^1 max{0, h(1+z) - 1} ], which is <= 0
/// whenever h satisfies the condition at every z_C.
template <typename Num>
Num check_vanish(const StructuredDecomposition& dec, const NarrowCutChain& chain, const HFunction& h, const MetricInstance& inst,
                 const std::vector<EdgeVector<Num>>& vCs, double condition_tol = 1e-12) {
  require_condition_at_cuts<Num>(chain, h, condition_tol);
  const CompleteGraph& g = inst.graph();
  Num total(0);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Rational& z = chain[i].z;
    const Num zn = from_rational<Num>(z);
    for (const WeightedTree& t : dec.trees) {
      if (t.sigma_end > z) break;
      const Num w = from_rational<Num>(t.weight) - (1 - zn) * detail::h_integral_between<Num>(h, t.sigma_begin, t.sigma_end);
      Rational c = 0;
      for (EdgeId e : tree_edges_in_cut(g, t.edges, chain[i].cut.side)) c += inst.cost(e);
      total -= w * from_rational<Num>(c);
    }
    Num excess;
    if constexpr (std::is_same_v<Num, Rational>) {
      excess = h.positive_part_integral_exact(z, Rational(1), z);
    } else {
      excess = h.positive_part_integral(z.get_d(), 1.0, z.get_d());
    }
    if (excess != Num(0)) total += vCs[i].cost_under(inst) * excess;
  }
  return total;
}

template <typename Num>
Num check_vanish(const StructuredDecomposition& dec, const NarrowCutChain& chain, const HFunction& h, const MetricInstance& inst) {
  return check_vanish<Num>(dec, chain, h, inst, build_all_vC<Num>(dec, chain, h, inst));
}

struct SampleCheck {
  std::string label;  ///< "start", "mid", "end" or "8/17"
  double sigma = 0;
  double beta = 0;
  bool y_nonnegative = false;
  bool member = false;
  double min_cut = 0;  ///< +inf when T_j is empty
  VertexSet witness;
  double bound = 0;
  bool forest_plus_join_ok = false;
  bool tour_ok = false;
  bool weak_duality_ok = false;  ///< c^j(J_j) <= c^j(y)
};

struct TreeCertificate {
  std::size_t j = 0;
  double q = 0;  ///< int over the interval of (1+h), normalized
  std::vector<SampleCheck> samples;
  CjInequality cj;
  bool lonely_cuts_odd = false;  ///< every lonely cut is a T_j-cut
};

struct CutCertificate {
  std::size_t index = 0;
  Rational z;
  double v_sum = 0;
  bool support_ok = false;  ///< supp(v^C) within the lonely edges at C
  double cost = 0;          ///< c(v^C)
};

struct CertificateReport {
  std::string h;
  double h_integral = 0;
  double rho_h = 0;
  std::optional<Rational> rho_h_exact;
  double rho_star = 0;
  double vanish = 0;
  bool vanish_ok = false;
  std::string vanish_error;  ///< precondition failure, if any
  double weighted_average = 0;  ///< sum_j q_j c(tour_j) / c(x*)
  bool weighted_ok = false;
  bool best_ok = false;  ///< min_j c(tour_j) <= rho(h) c(x*)
  /// For constant h: 2 - beta, which coincides with rho(h).
  std::optional<Rational> two_minus_beta;
  std::vector<TreeCertificate> trees;
  std::vector<CutCertificate> cuts;
  bool sampled = true;

  bool samples_ok() const {
    for (const TreeCertificate& t : trees)
      for (const SampleCheck& s : t.samples)
        if (!(s.y_nonnegative && s.member && s.forest_plus_join_ok && s.tour_ok && s.weak_duality_ok)) return false;
    return true;
  }
  bool cj_ok() const {
    for (const TreeCertificate& t : trees)
      if (!t.cj.holds || !t.lonely_cuts_odd) return false;
    return true;
  }
  bool cuts_ok() const {
    for (const CutCertificate& c : cuts)
      if (!c.support_ok) return false;
    return true;
  }
  bool passed() const { return vanish_ok && weighted_ok && best_ok && samples_ok() && cj_ok() && cuts_ok(); }
};

/// Sample check for one tree at one beta with the given v^C vectors.
template <typename Num>
SampleCheck sample_tree(const TreeContext& ctx, const TreeTourResult& tour, const NarrowCutChain& chain, const FractionalSolution& xsol,
                        const Num& beta, const std::vector<EdgeVector<Num>>& vCs, const CertificateTolerances& tol) {
  const MetricInstance& inst = xsol.instance;
  SampleCheck s;
  s.beta = detail::as_double(beta);
  const EdgeVector<Num> y = build_parity_vector<Num>(ctx, chain, xsol, beta, vCs);
  s.y_nonnegative = true;
  for (EdgeId e = 0; e < y.size(); ++e) s.y_nonnegative &= !(y[e] < Num(0));
  const auto poly = check_tjoin_polyhedron<Num>(y, ctx.parity, inst, tol.comparison);
  s.member = poly.member;
  s.min_cut = poly.min_value ? detail::as_double(*poly.min_value) : std::numeric_limits<double>::infinity();
  s.witness = poly.witness;
  const auto tb = per_tree_bound<Num>(ctx, tour, chain, xsol, beta, vCs, tol.comparison);
  s.bound = detail::as_double(tb.bound);
  s.forest_plus_join_ok = tb.forest_plus_join_ok;
  s.tour_ok = tb.tour_ok;
  Num cjy(0);
  for (EdgeId e = 0; e < y.size(); ++e) cjy += from_rational<Num>(ctx.modified_cost[e]) * y[e];
  const double slack = tol.comparison * std::max(1.0, std::abs(detail::as_double(cjy)));
  s.weak_duality_ok = detail::as_double(Num(from_rational<Num>(tour.join.cost) - cjy)) <= slack;
  return s;
}

/// All instance-level checks for one h. Quantities involving the closed-form h
/// are evaluated in double precision; cut inequalities stay exact.
inline CertificateReport aggregate_certificate(const BomcResult& run, const HFunction& h, const CertificateTolerances& tol = {}) {
  const FractionalSolution& xsol = run.lp;
  const MetricInstance& inst = xsol.instance;
  const CompleteGraph& g = inst.graph();
  const NarrowCutChain& chain = run.chain;
  const StructuredDecomposition& dec = run.decomposition;

  CertificateReport rep;
  rep.h = h.describe();
  rep.h_integral = h_integral(h);
  rep.rho_h = rho_of_h(h);
  if (h.is_exact()) rep.rho_h_exact = rho_of_h_exact(h);
  rep.rho_star = rho_star();
  if (h.kind() == HFunction::Kind::Constant) {
    const Rational& c = h.buckets()[0];
    rep.two_minus_beta = 2 - c / (1 + c);
  }

  const auto vCs = build_all_vC<double>(dec, chain, h, inst);
  const HFunction eight_ninths = HFunction::constant(ratio(8, 9));
  const auto vCs_const = build_all_vC<double>(dec, chain, eight_ninths, inst);

  for (std::size_t i = 0; i < chain.size(); ++i) {
    CutCertificate cc;
    cc.index = i;
    cc.z = chain[i].z;
    cc.support_ok = true;
    std::vector<EdgeId> allowed;
    for (const WeightedTree& t : dec.trees) {
      if (t.sigma_end > chain[i].z) break;
      for (EdgeId e : tree_edges_in_cut(g, t.edges, chain[i].cut.side)) allowed.push_back(e);
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      cc.v_sum += vCs[i][e];
      if (vCs[i][e] != 0.0 && std::find(allowed.begin(), allowed.end(), e) == allowed.end()) cc.support_ok = false;
    }
    if (std::abs(cc.v_sum - 1.0) > tol.normalization) cc.support_ok = false;
    cc.cost = vCs[i].cost_under(inst);
    rep.cuts.push_back(cc);
  }

  const double lp = xsol.value.get_d();
  double avg = 0;
  for (std::size_t j = 0; j < dec.trees.size(); ++j) {
    const WeightedTree& t = dec.trees[j];
    const TreeContext& ctx = run.contexts[j];
    const TreeTourResult& tour = run.tours[j];
    TreeCertificate tc;
    tc.j = j;
    tc.q = (t.weight.get_d() + h.integral(t.sigma_begin.get_d(), t.sigma_end.get_d())) / (1.0 + rep.h_integral);
    avg += tc.q * tour.tour.cost.get_d();
    const Rational mid = (t.sigma_begin + t.sigma_end) / 2;
    const std::pair<const char*, Rational> points[] = {{"start", t.sigma_begin}, {"mid", mid}, {"end", t.sigma_end}};
    for (const auto& [label, sigma] : points) {
      const double hv = h(sigma.get_d());
      SampleCheck s = sample_tree<double>(ctx, tour, chain, xsol, hv / (1.0 + hv), vCs, tol);
      s.label = label;
      s.sigma = sigma.get_d();
      tc.samples.push_back(s);
    }
    SampleCheck s = sample_tree<double>(ctx, tour, chain, xsol, 8.0 / 17.0, vCs_const, tol);
    s.label = "8/17";
    s.sigma = -1;
    tc.samples.push_back(s);
    tc.cj = check_cj_inequality(ctx, chain, xsol);
    tc.lonely_cuts_odd = true;
    for (const LonelyCut& l : ctx.lonely) tc.lonely_cuts_odd &= (chain[l.cut].cut.side & ctx.parity).size() % 2 == 1;
    rep.trees.push_back(std::move(tc));
  }

  const double scale = std::max(1.0, std::abs(lp));
  rep.weighted_average = lp > 0 ? avg / lp : 1.0;
  rep.weighted_ok = avg <= rep.rho_h * lp + tol.aggregate * scale;
  rep.best_ok = run.best_cost.get_d() <= rep.rho_h * lp + tol.comparison * scale;

  try {
    rep.vanish = check_vanish<double>(dec, chain, h, inst, vCs, tol.condition);
    rep.vanish_ok = rep.vanish <= tol.comparison * scale;
  } catch (const PreconditionError& err) {
    rep.vanish_error = err.what();
    rep.vanish_ok = false;
  }
  return rep;
}

}  // namespace pathtsp
