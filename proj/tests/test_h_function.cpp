#include <gtest/gtest.h>

#include <cmath>

#include "pathtsp/h_function.hpp"
#include "pathtsp/h_optimizer.hpp"
#include "pathtsp/lp.hpp"

namespace pathtsp {
namespace {

TEST(Condition, DefaultTightAtZero) { EXPECT_NEAR(eval_condition(HFunction::default_h(), 0.0), 0.0, 1e-15); }

TEST(Condition, DefaultNonpositiveOnGrid) {
  const HFunction h = HFunction::default_h();
  double worst = -1;
  for (int i = 0; i <= 10000; ++i) worst = std::max(worst, eval_condition(h, i / 10000.0));
  EXPECT_LE(worst, 1e-12);
}

TEST(Condition, EightNinthsTouchesZeroAtQuarter) {
  const HFunction h = HFunction::constant(ratio(8, 9));
  EXPECT_EQ(eval_condition_exact(h, ratio(1, 4)), 0);
  // -(4z-1)^2/9 for z >= 1/8, where h(1+z) >= 1 on the whole upper range.
  for (const Rational& z : {ratio(1, 8), ratio(1, 2), ratio(3, 4), Rational(1)})
    EXPECT_EQ(eval_condition_exact(h, z), Rational(-(4 * z - 1) * (4 * z - 1) / 9)) << z;
  EXPECT_EQ(eval_condition_exact(h, ratio(1, 10)), -ratio(1, 10) * (1 + ratio(8, 10)) / 9);
}

TEST(Condition, OneViolatesAtQuarter) {
  const HFunction h = HFunction::constant(Rational(1));
  EXPECT_EQ(eval_condition_exact(h, ratio(1, 4)), ratio(1, 8));
  EXPECT_NEAR(eval_condition(h, 0.25), 0.125, 1e-15);
}

TEST(Condition, RejectsOutOfRange) {
  EXPECT_THROW(eval_condition(HFunction::default_h(), 1.5), InputError);
  EXPECT_THROW(eval_condition_exact(HFunction::constant(Rational(0)), Rational(-1)), InputError);
}

TEST(Condition, DoubleAgreesWithExactForPiecewise) {
  const HFunction h = HFunction::piecewise({Rational(1), ratio(9, 10), ratio(4, 5), ratio(3, 5)});
  for (int i = 0; i <= 40; ++i) EXPECT_NEAR(eval_condition(h, i / 40.0), eval_condition_exact(h, ratio(i, 40)).get_d(), 1e-12);
}

TEST(Rho, KnownValues) {
  EXPECT_NEAR(rho_of_h(HFunction::default_h()), 1.0 + 1.0 / (1.0 + 4.0 * std::log(1.25)), 1e-15);
  EXPECT_LT(rho_of_h(HFunction::default_h()), 1.5284);
  EXPECT_EQ(rho_of_h_exact(HFunction::constant(ratio(8, 9))), ratio(26, 17));
  EXPECT_EQ(ratio(26, 17), ratio(3, 2) + ratio(1, 34));
  EXPECT_EQ(rho_of_h_exact(HFunction::constant(Rational(0))), 2);
  EXPECT_DOUBLE_EQ(rho_star(), rho_of_h(HFunction::default_h()));
}

TEST(DefaultInequalities, Grid) {
  const DefaultHInequalities r = check_default_h_inequalities(10000);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.value_at_zero, 0.0, 1e-15);
  EXPECT_NEAR(r.value_at_one, 2 * std::log(1.6) - 1, 1e-15);
  EXPECT_NEAR(r.value_at_one, -0.0600, 5e-5);
  EXPECT_LE(r.max_bound, 0.0);
  EXPECT_NEAR(default_h_derivative_bound(1.0), -3.0 / 25.0, 1e-15);
}

TEST(Supremum, EightNinths) {
  const ConditionMaximum m = condition_supremum(HFunction::constant(ratio(8, 9)));
  EXPECT_EQ(m.value, 0);
}

TEST(Supremum, ConstantOneAtQuarter) {
  const ConditionMaximum m = condition_supremum(HFunction::constant(Rational(1)));
  EXPECT_EQ(m.value, ratio(1, 8));
  EXPECT_EQ(m.argmax, ratio(1, 4));
}

TEST(ZGrid, ContainsBucketBoundaries) {
  const auto g = z_grid(3, 4);
  EXPECT_EQ(g.front(), 0);
  EXPECT_EQ(g.back(), 1);
  for (int i = 0; i <= 3; ++i) EXPECT_TRUE(std::binary_search(g.begin(), g.end(), ratio(i, 3)));
  EXPECT_EQ(g.size(), 7u);
}

// The same discretized problem written with one auxiliary per (z, bucket),
// solved by the dense tableau.
Rational auxiliary_lp_objective(int m, int k) {
  lp::Model model;
  model.set_sense(lp::Sense::Maximize);
  std::vector<std::size_t> h;
  for (int i = 0; i < m; ++i) h.push_back(model.add_variable(ratio(1, m), Rational(0), Rational(1)));
  for (const Rational& z : z_grid(m, k)) {
    std::vector<lp::Term> row;
    Rational rhs = 0;
    for (int i = 0; i < m; ++i) {
      const Rational lo = ratio(i, m), hi = ratio(i + 1, m);
      const Rational above = std::max(Rational(0), Rational(hi - std::max(lo, z)));
      const Rational below = std::max(Rational(0), Rational(std::min(hi, z) - lo));
      if (sgn(above) > 0) {
        const auto u = model.add_variable(0);
        row.push_back({u, 1});
        model.add_row({{u, 1}, {h[i], -above * (1 + z)}}, lp::Relation::GreaterEqual, -above);
      }
      if (sgn(below) > 0) {
        row.push_back({h[i], below * (1 - z)});
        rhs += below;
      }
    }
    model.add_row(row, lp::Relation::LessEqual, rhs);
  }
  const lp::Outcome out = lp::solve(model);
  EXPECT_EQ(out.status, lp::Status::Optimal);
  return out.objective;
}

TEST(Optimizer, MatchesAuxiliaryFormulation) {
  for (auto [m, k] : {std::pair{1, 8}, std::pair{2, 6}, std::pair{4, 8}, std::pair{5, 10}}) {
    const OptimizedH r = optimize_h(m, k);
    EXPECT_EQ(r.objective, auxiliary_lp_objective(m, k)) << "m=" << m << " k=" << k;
  }
}

TEST(Optimizer, CertifiedBasisAgreesWithExactFallback) {
  HOptimizerOptions exact_only;
  exact_only.approx_max_pivots = 0;
  for (auto [m, k] : {std::pair{3, 9}, std::pair{8, 16}, std::pair{12, 24}}) {
    const OptimizedH a = optimize_h(m, k);
    const OptimizedH b = optimize_h(m, k, exact_only);
    EXPECT_FALSE(b.certified_basis);
    EXPECT_EQ(a.objective, b.objective) << "m=" << m << " k=" << k;
  }
}

TEST(Optimizer, SingleBucketRecoversEightNinths) {
  const OptimizedH r = optimize_h(1, 400);
  EXPECT_EQ(r.h.buckets()[0], ratio(8, 9));
  EXPECT_EQ(r.rho, ratio(26, 17));
}

TEST(Optimizer, RhoReproducedAndGridFeasible) {
  const OptimizedH r = optimize_h(20, 40);
  EXPECT_NEAR(rho_of_h(r.h), r.rho.get_d(), 1e-12);
  for (const Rational& z : z_grid(20, 40)) EXPECT_LE(eval_condition_exact(r.h, z), 0);
  EXPECT_LE(r.rho.get_d(), rho_of_h(HFunction::default_h()) + 1e-6);
  EXPECT_GT(r.tight_points, 0u);
}

TEST(Optimizer, RefiningTheGridNeverLowersRho) {
  Rational prev = 0;
  for (int k : {5, 10, 20, 40}) {
    const OptimizedH r = optimize_h(10, k);
    EXPECT_GE(r.rho, prev) << "k=" << k;
    prev = r.rho;
  }
}

TEST(Optimizer, RejectsBadSizes) {
  EXPECT_THROW(optimize_h(0, 10), InputError);
  EXPECT_THROW(optimize_h(10, 0), InputError);
}

}  // namespace
}  // namespace pathtsp
