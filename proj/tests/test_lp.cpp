#include <gtest/gtest.h>

#include <random>

#include "pathtsp/lp.hpp"
#include "pathtsp/lp_column_generation.hpp"

namespace pathtsp::lp {
namespace {

TEST(LpSolve, LowerBoundRow) {
  Model m;
  const auto x = m.add_variable(1, std::nullopt);
  m.add_row({{x, 1}}, Relation::GreaterEqual, 3);
  const Outcome out = solve(m);
  ASSERT_EQ(out.status, Status::Optimal);
  EXPECT_EQ(out.primal[x], 3);
  EXPECT_EQ(out.objective, 3);
}

TEST(LpSolve, MaximizeOverSimplex) {
  Model m;
  m.set_sense(Sense::Maximize);
  const auto x = m.add_variable(1), y = m.add_variable(1);
  m.add_row({{x, 1}, {y, 1}}, Relation::LessEqual, 1);
  const Outcome out = solve(m);
  ASSERT_EQ(out.status, Status::Optimal);
  EXPECT_EQ(out.objective, 1);
  EXPECT_EQ(out.primal[x] + out.primal[y], 1);
}

TEST(LpSolve, Infeasible) {
  Model m;
  const auto x = m.add_variable(1);
  m.add_row({{x, 1}}, Relation::LessEqual, -1);
  EXPECT_EQ(solve(m).status, Status::Infeasible);
}

TEST(LpSolve, Unbounded) {
  Model m;
  const auto x = m.add_variable(-1);
  m.add_row({{x, 1}}, Relation::GreaterEqual, 1);
  EXPECT_EQ(solve(m).status, Status::Unbounded);
}

TEST(LpSolve, RejectsUndeclaredVariable) {
  Model m;
  m.add_variable(1);
  EXPECT_THROW(m.add_row({{3, 1}}, Relation::GreaterEqual, 0), InputError);
}

TEST(LpResolve, AddedRowMovesOptimum) {
  Model m;
  const auto x = m.add_variable(1);
  ASSERT_EQ(solve(m).primal[x], 0);
  const Outcome out = resolve(m, {Constraint{{{x, 1}}, Relation::GreaterEqual, 2}});
  ASSERT_EQ(out.status, Status::Optimal);
  EXPECT_EQ(out.primal[x], 2);
}

TEST(LpResolve, SatisfiedRowLeavesOutcome) {
  Model m;
  const auto x = m.add_variable(1), y = m.add_variable(2);
  m.add_row({{x, 1}, {y, 1}}, Relation::GreaterEqual, 4);
  const Outcome before = solve(m);
  const Outcome after = resolve(m, {Constraint{{{y, 1}}, Relation::LessEqual, 10}});
  EXPECT_EQ(after.status, before.status);
  EXPECT_EQ(after.primal, before.primal);
  EXPECT_EQ(after.objective, before.objective);
}

TEST(LpResolve, ContradictoryRows) {
  Model m;
  const auto x = m.add_variable(1);
  solve(m);
  const Outcome out =
      resolve(m, {Constraint{{{x, 1}}, Relation::GreaterEqual, 1}, Constraint{{{x, 1}}, Relation::LessEqual, 0}});
  EXPECT_EQ(out.status, Status::Infeasible);
}

// Random covering LPs min c x, A x >= b, x >= 0 with positive data: the primal
// must satisfy every row exactly, and the duals must reproduce the objective.
TEST(LpSolve, RandomCoveringDuality) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int nv = 2 + static_cast<int>(rng() % 5), nr = 1 + static_cast<int>(rng() % 5);
    Model m;
    for (int j = 0; j < nv; ++j) m.add_variable(Rational(1 + static_cast<long>(rng() % 9)));
    for (int i = 0; i < nr; ++i) {
      std::vector<Term> terms;
      for (int j = 0; j < nv; ++j) terms.push_back({static_cast<std::size_t>(j), ratio(static_cast<long>(rng() % 4), 1 + static_cast<long>(rng() % 3))});
      terms[rng() % nv].coef += 1;
      m.add_row(terms, Relation::GreaterEqual, Rational(1 + static_cast<long>(rng() % 6)));
    }
    const Outcome out = solve(m);
    ASSERT_EQ(out.status, Status::Optimal);
    Rational obj = 0, dual_obj = 0;
    for (int j = 0; j < nv; ++j) {
      EXPECT_GE(out.primal[j], 0);
      obj += m.objective(j) * out.primal[j];
    }
    EXPECT_EQ(obj, out.objective);
    for (std::size_t i = 0; i < m.row_count(); ++i) {
      Rational lhs = 0;
      for (const Term& t : m.rows()[i].terms) lhs += t.coef * out.primal[t.var];
      EXPECT_GE(lhs, m.rows()[i].rhs);
      EXPECT_GE(out.dual[i], 0);
      dual_obj += out.dual[i] * m.rows()[i].rhs;
    }
    EXPECT_EQ(dual_obj, out.objective);
  }
}

// Column generation over a fixed column pool must agree with the tableau.
TEST(ColumnGeneration, MatchesTableauOnEqualityForm) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const int nr = 2 + static_cast<int>(rng() % 3), nc = 4 + static_cast<int>(rng() % 5);
    std::vector<Column> cols(nc);
    for (int j = 0; j < nc; ++j) {
      cols[j].cost = Rational(static_cast<long>(rng() % 7));
      cols[j].tag = j;
      for (int r = 0; r < nr; ++r) {
        const long v = static_cast<long>(rng() % 3);
        if (v != 0) cols[j].entries.push_back({static_cast<std::size_t>(r), Rational(v)});
      }
    }
    std::vector<Rational> rhs(nr);
    for (int r = 0; r < nr; ++r) rhs[r] = Rational(static_cast<long>(rng() % 5));

    Model m;
    for (const Column& c : cols) m.add_variable(c.cost);
    for (int r = 0; r < nr; ++r) {
      std::vector<Term> terms;
      for (int j = 0; j < nc; ++j)
        for (const auto& [row, v] : cols[j].entries)
          if (static_cast<int>(row) == r) terms.push_back({static_cast<std::size_t>(j), v});
      m.add_row(terms, Relation::Equal, rhs[r]);
    }
    const Outcome ref = solve(m);

    ColumnGenerationSimplex cg(rhs, {});
    const auto oracle = [&](const std::vector<Rational>&, bool) { return cols; };
    const auto res = cg.solve(oracle);
    ASSERT_EQ(res.status == Status::Optimal, ref.status == Status::Optimal) << "trial " << trial;
    if (ref.status == Status::Optimal) EXPECT_EQ(res.objective, ref.objective) << "trial " << trial;
  }
}

}  // namespace
}  // namespace pathtsp::lp
