#include <gtest/gtest.h>

#include <cmath>

#include "pathtsp/certificates.hpp"
#include "pathtsp/harness/generators.hpp"
#include "support/instances.hpp"

namespace pathtsp {
namespace {

const Rational kBeta = ratio(8, 17);
const HFunction kEightNinths = HFunction::constant(ratio(8, 9));

std::vector<EdgeVector<Rational>> exact_vCs(const BomcResult& r, const HFunction& h) {
  return build_all_vC<Rational>(r.decomposition, r.chain, h, r.lp.instance);
}

TEST(VC, SingleLonelyEdge) {
  const BomcResult r = best_of_many(testing::p3());
  const auto& g = r.lp.instance.graph();
  const auto v = build_vC<Rational>(r.decomposition, r.chain, 0, kEightNinths, r.lp.instance);
  EXPECT_EQ(v, EdgeVector<Rational>(std::vector<Rational>{1, 0, 0}));
  EXPECT_EQ(v[g.id(0, 1)], 1);
  const auto vd = build_vC<double>(r.decomposition, r.chain, 0, HFunction::default_h(), r.lp.instance);
  EXPECT_EQ(vd[g.id(0, 1)], 1.0);
}

TEST(VC, FractionalSquareSplitsEvenly) {
  const FractionalSolution xs = testing::fractional_square();
  const NarrowCutChain chain = narrow_cuts(xs);
  const auto dec = structured_decomposition(base_decomposition(xs), chain, xs);
  const auto& g = xs.instance.graph();
  for (const HFunction& h : {kEightNinths, HFunction::constant(Rational(0)), HFunction::piecewise({ratio(1, 3), Rational(1)})}) {
    const auto v = build_vC<Rational>(dec, chain, 0, h, xs.instance);
    EXPECT_EQ(v[g.id(0, 1)], ratio(1, 2));
    EXPECT_EQ(v[g.id(0, 2)], ratio(1, 2));
  }
}

TEST(VC, DefaultWeightsAtZOne) {
  // At z = 1 the integrand 1 - h + z h is 1, so the weight of a prefix tree is its p_j.
  const FractionalSolution xs = testing::fractional_square();
  const NarrowCutChain chain = narrow_cuts(xs);
  const auto dec = structured_decomposition(base_decomposition(xs), chain, xs);
  const auto v = build_vC<double>(dec, chain, 1, HFunction::default_h(), xs.instance);
  double sum = 0;
  for (double e : v.values()) sum += e;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  const HFunction h = HFunction::default_h();
  const double z = 1.0;
  EXPECT_EQ(z - (1.0 - z) * h.integral(0.0, z), 1.0);
}

TEST(ParityVector, P3AtEightSeventeenths) {
  const BomcResult r = best_of_many(testing::p3());
  const auto y = build_parity_vector<Rational>(r.contexts[0], r.chain, r.lp, kBeta, exact_vCs(r, kEightNinths));
  const auto& g = r.lp.instance.graph();
  EXPECT_EQ(y[g.id(0, 1)], 1);
  EXPECT_EQ(y[g.id(1, 2)], 1);
  EXPECT_EQ(y[g.id(0, 2)], 0);
}

TEST(ParityVector, P3AtOneHalf) {
  const BomcResult r = best_of_many(testing::p3());
  const auto y = build_parity_vector<Rational>(r.contexts[0], r.chain, r.lp, ratio(1, 2), exact_vCs(r, kEightNinths));
  EXPECT_EQ(y[r.lp.instance.graph().id(0, 1)], 1);
}

TEST(ParityVector, NoNarrowCuts) {
  const BomcResult r = best_of_many(testing::p4());
  const TreeContext ctx = build_tree_context(r.decomposition, NarrowCutChain{}, r.lp.instance, 0);
  const Rational beta = ratio(1, 3), alpha = 1 - 2 * beta;
  const auto y = build_parity_vector<Rational>(ctx, NarrowCutChain{}, r.lp, beta, {});
  for (EdgeId e = 0; e < y.size(); ++e) {
    const bool in_tree = std::find(ctx.tree.begin(), ctx.tree.end(), e) != ctx.tree.end();
    EXPECT_EQ(y[e], beta * r.lp.x[e] + (in_tree ? alpha : Rational(0)));
  }
}

TEST(ParityVector, RejectsBetaOutOfRange) {
  const BomcResult r = best_of_many(testing::p3());
  EXPECT_THROW(build_parity_vector<Rational>(r.contexts[0], r.chain, r.lp, ratio(3, 5), exact_vCs(r, kEightNinths)), InputError);
}

TEST(Polyhedron, P3ParityVector) {
  const BomcResult r = best_of_many(testing::p3());
  const auto y = build_parity_vector<Rational>(r.contexts[0], r.chain, r.lp, kBeta, exact_vCs(r, kEightNinths));
  const auto check = check_tjoin_polyhedron<Rational>(y, VertexSet::of({0, 2}), r.lp.instance);
  EXPECT_TRUE(check.member);
  ASSERT_TRUE(check.min_value.has_value());
  EXPECT_EQ(*check.min_value, 1);
}

TEST(Polyhedron, ZeroVector) {
  const MetricInstance inst = testing::p3();
  const auto check = check_tjoin_polyhedron<Rational>(EdgeVector<Rational>(inst.edge_count()), VertexSet::of({0, 2}), inst);
  EXPECT_FALSE(check.member);
  EXPECT_EQ(check.witness, VertexSet::of({0}));
}

TEST(Polyhedron, EmptyTerminalSet) {
  const MetricInstance inst = testing::p3();
  const auto check = check_tjoin_polyhedron<Rational>(EdgeVector<Rational>(inst.edge_count()), VertexSet{}, inst);
  EXPECT_TRUE(check.member);
  EXPECT_FALSE(check.min_value.has_value());
}

// Gray-code enumeration against a direct evaluation of every odd cut.
TEST(Polyhedron, MatchesDirectEnumeration) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MetricInstance inst = gen::gen_instance(7, seed, gen::Mode::RandomMetric);
    const auto& g = inst.graph();
    EdgeVector<Rational> y(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) y[e] = Rational(static_cast<long>((e * 7 + seed) % 5), 4);
    const VertexSet T = VertexSet::of({1, 3, 4, 6});
    std::optional<Rational> best;
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << 7); ++mask) {
      const VertexSet U(mask);
      if ((U & T).size() % 2 == 0) continue;
      const Rational v = cut_value(y, g, U);
      if (!best || v < *best) best = v;
    }
    const auto check = check_tjoin_polyhedron<Rational>(y, T, inst);
    EXPECT_EQ(*check.min_value, *best);
    EXPECT_EQ(check.member, *best >= 1);
  }
}

TEST(PerTreeBound, P3AndP4AreTight) {
  for (int n : {3, 4}) {
    const BomcResult r = best_of_many(testing::path_metric(n));
    const auto tb = per_tree_bound<Rational>(r.contexts[0], r.tours[0], r.chain, r.lp, kBeta, exact_vCs(r, kEightNinths));
    EXPECT_EQ(tb.bound, n - 1);
    EXPECT_EQ(tb.forest_plus_join, n - 1);
    EXPECT_EQ(tb.tour, n - 1);
    EXPECT_TRUE(tb.forest_plus_join_ok);
    EXPECT_TRUE(tb.tour_ok);
  }
}

TEST(PerTreeBound, NoNarrowCuts) {
  const BomcResult r = best_of_many(testing::p4());
  const TreeContext ctx = build_tree_context(r.decomposition, NarrowCutChain{}, r.lp.instance, 0);
  const TreeTourResult tour = tour_from_tree(ctx, r.lp.instance);
  const Rational beta = ratio(1, 4), alpha = 1 - 2 * beta;
  const auto tb = per_tree_bound<Rational>(ctx, tour, NarrowCutChain{}, r.lp, beta, {});
  EXPECT_EQ(tb.bound, (1 + alpha) * r.lp.instance.cost_of(ctx.tree) + beta * r.lp.value);
}

TEST(CjInequality, SmallPathsAreTight) {
  for (int n : {3, 4}) {
    const BomcResult r = best_of_many(testing::path_metric(n));
    const CjInequality l = check_cj_inequality(r.contexts[0], r.chain, r.lp);
    EXPECT_EQ(l.lhs, n - 1);
    EXPECT_EQ(l.rhs, n - 1);
    EXPECT_TRUE(l.holds);
  }
}

TEST(CjInequality, NoLonelyCuts) {
  const BomcResult r = best_of_many(testing::p4());
  const TreeContext ctx = build_tree_context(r.decomposition, NarrowCutChain{}, r.lp.instance, 0);
  const CjInequality l = check_cj_inequality(ctx, NarrowCutChain{}, r.lp);
  EXPECT_EQ(l.lhs, l.rhs);
}

TEST(Vanish, P3DefaultIsMinusTwo) {
  const BomcResult r = best_of_many(testing::p3());
  EXPECT_NEAR(check_vanish<double>(r.decomposition, r.chain, HFunction::default_h(), r.lp.instance), -2.0, 1e-12);
  EXPECT_EQ(check_vanish<Rational>(r.decomposition, r.chain, kEightNinths, r.lp.instance), -2);
}

TEST(Vanish, NoNarrowCutsIsZero) {
  const BomcResult r = best_of_many(testing::p3());
  EXPECT_EQ(check_vanish<Rational>(r.decomposition, NarrowCutChain{}, kEightNinths, r.lp.instance), 0);
}

TEST(Vanish, ZeroHIsNonpositive) {
  const HFunction zero = HFunction::constant(Rational(0));
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const BomcResult r = best_of_many(gen::gen_instance(10, seed, gen::Mode::Euclidean));
    EXPECT_LE(check_vanish<Rational>(r.decomposition, r.chain, zero, r.lp.instance), 0);
  }
}

TEST(Vanish, ConditionViolationIsAPreconditionError) {
  NarrowCutChain chain;
  chain.cuts.push_back({Cut{VertexSet::of({0})}, ratio(7, 4), ratio(1, 4)});
  EXPECT_THROW(require_condition_at_cuts<Rational>(chain, HFunction::constant(Rational(1))), PreconditionError);
  EXPECT_NO_THROW(require_condition_at_cuts<Rational>(chain, kEightNinths));
}

TEST(Aggregate, P3) {
  const BomcResult r = best_of_many(testing::p3());
  const CertificateReport d = aggregate_certificate(r, HFunction::default_h());
  EXPECT_TRUE(d.passed());
  EXPECT_NEAR(d.rho_h, 1.5283809, 1e-7);
  const CertificateReport c = aggregate_certificate(r, kEightNinths);
  EXPECT_TRUE(c.passed());
  ASSERT_TRUE(c.rho_h_exact.has_value());
  EXPECT_EQ(*c.rho_h_exact, ratio(26, 17));
  ASSERT_TRUE(c.two_minus_beta.has_value());
  EXPECT_EQ(*c.two_minus_beta, ratio(26, 17));
  const CertificateReport z = aggregate_certificate(r, HFunction::constant(Rational(0)));
  EXPECT_TRUE(z.passed());
  EXPECT_EQ(*z.rho_h_exact, 2);
}

TEST(Aggregate, SeededInstancesPass) {
  for (gen::Mode mode : {gen::Mode::Euclidean, gen::Mode::RandomMetric})
    for (int n : {7, 10, 12})
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const BomcResult r = best_of_many(gen::gen_instance(n, seed, mode));
        for (const HFunction& h : {HFunction::default_h(), kEightNinths}) {
          const CertificateReport rep = aggregate_certificate(r, h);
          EXPECT_TRUE(rep.passed()) << gen::to_string(mode) << " n=" << n << " seed=" << seed << " h=" << rep.h;
        }
      }
}

// Every sample of every tree on the fractional seeds, exact with constant h.
TEST(Aggregate, FractionalSeedsExact) {
  const std::vector<std::tuple<gen::Mode, int, std::uint64_t>> cases{
      {gen::Mode::Euclidean, 10, 0}, {gen::Mode::Euclidean, 12, 5}, {gen::Mode::RandomMetric, 9, 4}, {gen::Mode::RandomMetric, 11, 0}};
  for (const auto& [mode, n, seed] : cases) {
    const BomcResult r = best_of_many(gen::gen_instance(n, seed, mode));
    ASSERT_GT(r.decomposition.trees.size(), 1u);
    const auto vCs = exact_vCs(r, kEightNinths);
    for (std::size_t j = 0; j < r.tours.size(); ++j) {
      const auto y = build_parity_vector<Rational>(r.contexts[j], r.chain, r.lp, kBeta, vCs);
      for (const Rational& v : y.values()) EXPECT_GE(v, 0);
      const auto poly = check_tjoin_polyhedron<Rational>(y, r.contexts[j].parity, r.lp.instance);
      if (poly.min_value) EXPECT_GE(*poly.min_value, 1);
      const auto tb = per_tree_bound<Rational>(r.contexts[j], r.tours[j], r.chain, r.lp, kBeta, vCs);
      EXPECT_LE(tb.forest_plus_join, tb.bound);
      EXPECT_TRUE(check_cj_inequality(r.contexts[j], r.chain, r.lp).holds);
    }
    EXPECT_LE(check_vanish<Rational>(r.decomposition, r.chain, kEightNinths, r.lp.instance, vCs), 0);
  }
}

}  // namespace
}  // namespace pathtsp
