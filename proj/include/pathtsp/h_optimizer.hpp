#pragma once

// Numerical search for a good weight function h.
//
// h is piecewise constant on m uniform buckets. For a fixed z the left-hand
// side of the feasibility condition is convex in h:
//
//   f_h(z) = sum_i o+_i(z) max{0, h_i(1+z) - 1} + sum_i o-_i(z) h_i (1-z) - z
//
// with o+_i(z) = |bucket_i ∩ [z,1]| and o-_i(z) = |bucket_i ∩ [0,z]|. We maximize
// int h = sum_i h_i / m subject to f_h(z) <= 0 for every z of a finite grid.
//
// Two linearizations of the max terms are used. The projected one: f_h(z) <= 0
// iff for every subset S of buckets
//
//   sum_{i in S} o+_i (1+z) h_i + sum_i o-_i (1-z) h_i <= sum_{i in S} o+_i + z.
//
// The breakpoint one: each term is linear in h_i between the kinks 1/(1+z),
// z in the grid, so with h_i = sum_t lambda_{i,t} kappa_t, a convex combination
// of the kinks kappa_t = 1/(1+z_t) and 0, every grid condition becomes linear
// in lambda. Convexity of the terms makes both exact.
//
// The breakpoint LP is solved in double precision, and its final basis is then
// re-solved and verified in exact arithmetic: primal and dual feasibility and
// equal objectives. When that certificate fails (it has not in practice) the
// projected LP is solved exactly by column generation instead; that is correct
// but slow for large m, because the optimum is very degenerate.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "pathtsp/errors.hpp"
#include "pathtsp/h_function.hpp"
#include "pathtsp/lp.hpp"
#include "pathtsp/lp_column_generation.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp {

struct HOptimizerOptions {
  std::size_t max_pivots = 200000;          ///< exact column generation (fallback)
  std::size_t approx_max_pivots = 2000000;  ///< double-precision breakpoint LP
};

struct OptimizedH {
  int buckets = 0;
  int zgrid = 0;
  HFunction h = HFunction::constant(Rational(0));
  Rational objective;  ///< int_0^1 h, exact
  Rational rho;        ///< 1 + 1/(1 + objective), exact
  /// true when the breakpoint basis was certified; false when column generation ran.
  bool certified_basis = false;
  std::size_t approx_pivots = 0;
  std::size_t exact_pivots = 0;
  std::size_t tight_points = 0;  ///< grid points with f_h(z) = 0
  /// max of f_h on the 10x finer z-grid (the grid constraints are a relaxation).
  double fine_grid_residual = 0;
  /// exact sup of f_h over [0,1] and where it is attained.
  ConditionMaximum supremum;
};

namespace detail {

/// o+_i(z), o-_i(z) for bucket i of m.
inline void bucket_overlaps(int m, int i, const Rational& z, Rational& above, Rational& below) {
  const Rational lo = ratio(i, m), hi = ratio(i + 1, m);
  above = hi - std::max(lo, z);
  if (sgn(above) < 0) above = 0;
  below = std::min(hi, z) - lo;
  if (sgn(below) < 0) below = 0;
}

/// Most violated subset inequality at z for the point h, or nullopt if f_h(z) <= 0.
inline std::optional<lp::Constraint> separate_at(const std::vector<Rational>& h, const Rational& z) {
  const int m = static_cast<int>(h.size());
  lp::Constraint row;
  row.rel = lp::Relation::LessEqual;
  row.rhs = z;
  Rational lhs_at_h = 0, above, below, coef;
  for (int i = 0; i < m; ++i) {
    bucket_overlaps(m, i, z, above, below);
    coef = below * (1 - z);
    const bool active = sgn(above) > 0 && h[i] * (1 + z) > 1;
    if (active) {
      coef += above * (1 + z);
      row.rhs += above;
    }
    if (sgn(coef) != 0) {
      lhs_at_h += coef * h[i];
      row.terms.push_back({static_cast<std::size_t>(i), coef});
    }
  }
  if (lhs_at_h <= row.rhs) return std::nullopt;
  return row;
}

}  // namespace detail

/// z-grid {j/k} together with all bucket boundaries {i/m}, sorted.
inline std::vector<Rational> z_grid(int m, int k) {
  std::vector<Rational> out;
  for (int j = 0; j <= k; ++j) out.push_back(ratio(j, k));
  for (int i = 0; i <= m; ++i) out.push_back(ratio(i, m));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

inline void bucket_overlaps(int m, int i, double z, double& above, double& below) {
  const double lo = double(i) / m, hi = double(i + 1) / m;
  above = std::max(0.0, hi - std::max(lo, z));
  below = std::max(0.0, std::min(hi, z) - lo);
}

/// phi_{z,i}(x) = o+_i(z) max{0, x(1+z) - 1} + o-_i(z) (1-z) x.
inline Rational bucket_term(int m, int i, const Rational& z, const Rational& x) {
  Rational above, below;
  bucket_overlaps(m, i, z, above, below);
  Rational v = below * (1 - z) * x;
  const Rational excess = x * (1 + z) - 1;
  if (sgn(excess) > 0) v += above * excess;
  return v;
}

/// Basis of the breakpoint LP, by column: lambda_{i,t} for kink t < T, the
/// zero breakpoint of bucket i as t == T, and the grid rows whose slack is basic.
struct BreakpointBasis {
  std::vector<std::vector<std::size_t>> kinks;  ///< per bucket
  std::vector<bool> slack_basic;                ///< per grid point
  std::size_t pivots = 0;
};

/// Solves the breakpoint LP in double precision,
///
///   min  -sum_{i,t} lambda_{i,t} kappa_t / m
///   s.t. sum_t lambda_{i,t} = 1  (row i),   sum_{i,t} lambda_{i,t} phi_{z,i}(kappa_t) + slack_z = z  (row m+z),
///
/// pricing the lambda columns of each bucket with suffix sums over the grid.
/// The right-hand side is perturbed slightly so that no pivot is degenerate;
/// the basis stays optimal for the unperturbed LP when the perturbation is small.
inline std::optional<BreakpointBasis> approximate_basis(int m, const std::vector<Rational>& exact_grid, std::size_t max_pivots) {
  constexpr double kTolerance = 1e-12;
  const std::size_t T = exact_grid.size();
  std::vector<double> grid, kappa(T);
  for (const Rational& z : exact_grid) grid.push_back(z.get_d());
  for (std::size_t t = 0; t < T; ++t) kappa[t] = 1.0 / (1.0 + grid[t]);
  std::vector<std::vector<double>> above(m, std::vector<double>(T)), below(m, std::vector<double>(T));
  for (int i = 0; i < m; ++i)
    for (std::size_t u = 0; u < T; ++u) bucket_overlaps(m, i, grid[u], above[i][u], below[i][u]);

  // Tags: lambda_{i,t} -> i*(T+1) + t with t == T for the zero breakpoint; slacks -> -1 - u.
  const std::size_t rows = m + T;
  std::vector<lp::BasicColumn<double>> seed;
  std::vector<std::optional<std::size_t>> unit(rows);
  for (int i = 0; i < m; ++i) seed.push_back({{{static_cast<std::size_t>(i), 1.0}}, 0.0, static_cast<long>(i * (T + 1) + T)});
  for (std::size_t u = 0; u < T; ++u) seed.push_back({{{m + u, 1.0}}, 0.0, -1 - static_cast<long>(u)});
  for (std::size_t r = 0; r < rows; ++r) unit[r] = r;

  auto column = [&](int i, std::size_t t) {
    lp::BasicColumn<double> col{{{static_cast<std::size_t>(i), 1.0}}, -kappa[t] / m, static_cast<long>(i * (T + 1) + t)};
    for (std::size_t u = 0; u < T; ++u) {
      double v = (1.0 - grid[u]) * below[i][u] * kappa[t];
      if (u > t) v += above[i][u] * ((1.0 + grid[u]) * kappa[t] - 1.0);
      if (v != 0.0) col.entries.emplace_back(m + u, v);
    }
    return col;
  };
  auto oracle = [&](const std::vector<double>& pi, bool) {
    std::vector<lp::BasicColumn<double>> out;
    for (int i = 0; i < m; ++i) {
      double p = 0;
      for (std::size_t u = 0; u < T; ++u) p += pi[m + u] * (1.0 - grid[u]) * below[i][u];
      // kappa_t (1+z_u) > 1 iff u > t; q and r are suffix sums over those u.
      double q = 0, r = 0, best = -kTolerance;
      std::optional<std::size_t> arg;
      for (std::size_t t = T; t-- > 0;) {
        const double d = -kappa[t] / m - pi[i] - kappa[t] * (p + q) + r;
        if (d < best) {
          best = d;
          arg = t;
        }
        q += pi[m + t] * above[i][t] * (1.0 + grid[t]);
        r += pi[m + t] * above[i][t];
      }
      if (arg) out.push_back(column(i, *arg));
    }
    return out;
  };

  std::vector<double> rhs(m, 1.0);
  rhs.insert(rhs.end(), grid.begin(), grid.end());
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t u = 0; u < T; ++u) rhs[m + u] += 1e-9 * unif(rng);

  lp::BasicColumnGenerationSimplex<double> simplex(rhs, std::move(seed), std::move(unit));
  lp::ColumnGenerationOptions cg;
  // Rounding can make the double simplex cycle; a healthy solve needs about 10 pivots per row.
  cg.max_pivots = std::min(max_pivots, 50 * rows);
  cg.tolerance = kTolerance;
  lp::BasicColumnGenerationResult<double> res;
  try {
    res = simplex.solve(oracle, cg);
  } catch (const ResourceError&) {
    return std::nullopt;
  }
  if (res.status != lp::Status::Optimal || res.basis.size() != rows) return std::nullopt;
  BreakpointBasis out;
  out.kinks.resize(m);
  out.slack_basic.assign(T, false);
  out.pivots = res.pivots;
  for (const auto& c : res.basis) {
    if (c.tag < 0)
      out.slack_basic[-1 - c.tag] = true;
    else
      out.kinks[c.tag / (T + 1)].push_back(c.tag % (T + 1));
  }
  return out;
}

/// Solves the square system a x = b exactly; nullopt if singular.
inline std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t j = 0; j < n; ++j) {
    std::optional<std::size_t> p;
    for (std::size_t r = j; r < n && !p; ++r)
      if (sgn(a[r][j]) != 0) p = r;
    if (!p) return std::nullopt;
    std::swap(a[j], a[*p]);
    std::swap(b[j], b[*p]);
    for (std::size_t r = j + 1; r < n; ++r) {
      if (sgn(a[r][j]) == 0) continue;
      const Rational f = a[r][j] / a[j][j];
      for (std::size_t c = j; c < n; ++c)
        if (sgn(a[j][c]) != 0) a[r][c] -= f * a[j][c];
      b[r] -= f * b[j];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t j = n; j-- > 0;) {
    Rational v = b[j];
    for (std::size_t c = j + 1; c < n; ++c)
      if (sgn(a[j][c]) != 0) v -= a[j][c] * x[c];
    x[j] = v / a[j][j];
  }
  return x;
}

/// Re-solves the breakpoint LP for the given basis in exact arithmetic and
/// checks that it is optimal. Returns the optimal h, or nullopt.
///
/// Eliminating one lambda per bucket through its convexity row leaves a square
/// system M x = r over the tight grid rows; the dual multipliers of those rows
/// solve M^T pi = d with the same matrix.
inline std::optional<std::vector<Rational>> certify_basis(int m, const std::vector<Rational>& grid, const BreakpointBasis& basis) {
  const std::size_t T = grid.size();
  std::vector<Rational> kappa(T + 1);
  for (std::size_t t = 0; t < T; ++t) kappa[t] = 1 / (1 + grid[t]);
  kappa[T] = 0;
  std::vector<std::size_t> tight;
  for (std::size_t u = 0; u < T; ++u)
    if (!basis.slack_basic[u]) tight.push_back(u);
  std::vector<std::pair<int, std::size_t>> unknowns;  // non-base lambda_{i,t}
  for (int i = 0; i < m; ++i) {
    if (basis.kinks[i].empty()) return std::nullopt;
    for (std::size_t a = 1; a < basis.kinks[i].size(); ++a) unknowns.emplace_back(i, basis.kinks[i][a]);
  }
  if (unknowns.size() != tight.size()) return std::nullopt;
  const std::size_t n = tight.size();
  auto base = [&](int i) { return basis.kinks[i][0]; };

  std::vector<std::vector<Rational>> mat(n, std::vector<Rational>(n)), mat_t(n, std::vector<Rational>(n));
  std::vector<Rational> r(n), d(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Rational& z = grid[tight[a]];
    r[a] = z;
    for (int i = 0; i < m; ++i) r[a] -= bucket_term(m, i, z, kappa[base(i)]);
    for (std::size_t c = 0; c < n; ++c) {
      const auto [i, t] = unknowns[c];
      mat[a][c] = bucket_term(m, i, z, kappa[t]) - bucket_term(m, i, z, kappa[base(i)]);
      mat_t[c][a] = mat[a][c];
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    const auto [i, t] = unknowns[c];
    d[c] = -(kappa[t] - kappa[base(i)]) / m;
  }
  const auto x = solve_square(mat, r);
  const auto pi_tight = solve_square(mat_t, d);
  if (!x || !pi_tight) return std::nullopt;

  // Primal: lambda >= 0, h, and slack >= 0 on every grid row.
  std::vector<Rational> base_weight(m, Rational(1)), h(m, Rational(0));
  for (std::size_t c = 0; c < n; ++c) {
    if (sgn((*x)[c]) < 0) return std::nullopt;
    const auto [i, t] = unknowns[c];
    base_weight[i] -= (*x)[c];
    h[i] += (*x)[c] * kappa[t];
  }
  for (int i = 0; i < m; ++i) {
    if (sgn(base_weight[i]) < 0) return std::nullopt;
    h[i] += base_weight[i] * kappa[base(i)];
  }
  for (std::size_t u = 0; u < T; ++u) {
    Rational load = 0;
    for (int i = 0; i < m; ++i) load += base_weight[i] * bucket_term(m, i, grid[u], kappa[base(i)]);
    for (std::size_t c = 0; c < n; ++c) load += (*x)[c] * bucket_term(m, unknowns[c].first, grid[u], kappa[unknowns[c].second]);
    if (load > grid[u]) return std::nullopt;
  }

  // Dual: pi <= 0 on grid rows, mu from the base columns, reduced costs >= 0.
  std::vector<Rational> pi(T, Rational(0));
  for (std::size_t a = 0; a < n; ++a) {
    if (sgn((*pi_tight)[a]) > 0) return std::nullopt;
    pi[tight[a]] = (*pi_tight)[a];
  }
  std::vector<Rational> mu(m);
  Rational dual_objective = 0, primal_objective = 0;
  Rational above, below;
  for (int i = 0; i < m; ++i) {
    mu[i] = -kappa[base(i)] / m;
    for (std::size_t u : tight) mu[i] -= pi[u] * bucket_term(m, i, grid[u], kappa[base(i)]);
    if (sgn(mu[i]) > 0) return std::nullopt;  // the zero breakpoint column
    dual_objective += mu[i];
    primal_objective -= h[i] / m;
    Rational p = 0;
    std::vector<Rational> a_plus(T), b_minus(T);
    for (std::size_t u : tight) {
      bucket_overlaps(m, i, grid[u], above, below);
      p += pi[u] * (1 - grid[u]) * below;
      a_plus[u] = above;
    }
    Rational q = 0, s = 0, rc;
    for (std::size_t t = T; t-- > 0;) {
      rc = -kappa[t] / m - mu[i] - kappa[t] * (p + q) + s;
      if (sgn(rc) < 0) return std::nullopt;
      if (sgn(pi[t]) != 0) {
        q += pi[t] * a_plus[t] * (1 + grid[t]);
        s += pi[t] * a_plus[t];
      }
    }
  }
  for (std::size_t u : tight) dual_objective += pi[u] * grid[u];
  if (dual_objective != primal_objective) return std::nullopt;
  return h;
}

}  // namespace detail

/// Maximizes int h over piecewise-constant h on m buckets subject to the
/// feasibility condition at every z of z_grid(m, k). Exact.
inline OptimizedH optimize_h(int m, int k, const HOptimizerOptions& opt = {}) {
  if (m < 1 || k < 1) throw InputError("buckets and z-grid size must be >= 1");
  const std::vector<Rational> grid = z_grid(m, k);

  OptimizedH out;
  out.buckets = m;
  out.zgrid = k;
  std::optional<std::vector<Rational>> h;
  if (const auto basis = detail::approximate_basis(m, grid, opt.approx_max_pivots)) {
    out.approx_pivots = basis->pivots;
    h = detail::certify_basis(m, grid, *basis);
  }
  out.certified_basis = h.has_value();

  if (!h) {
    // Projected LP through its dual  min rhs^T y + 1^T w  s.t.  A^T y + w - s = 1,
    // which has one row per bucket; the simplex multipliers are h itself, so
    // pricing a cut column is the separation problem over the grid.
    std::vector<lp::Column> seed;
    std::vector<std::optional<std::size_t>> unit(m);
    for (int i = 0; i < m; ++i) {
      seed.push_back({{{static_cast<std::size_t>(i), Rational(1)}}, Rational(1)});  // w_i: h_i <= 1
      unit[i] = seed.size() - 1;
      seed.push_back({{{static_cast<std::size_t>(i), Rational(-1)}}, Rational(0)});  // s_i: h_i >= 0
    }
    auto oracle = [&](const std::vector<Rational>& pi, bool) {
      std::vector<lp::Column> cols;
      for (const Rational& z : grid) {
        if (auto row = detail::separate_at(pi, z)) {
          lp::Column col{{}, row->rhs};
          for (const lp::Term& t : row->terms) col.entries.emplace_back(t.var, t.coef);
          cols.push_back(std::move(col));
        }
      }
      return cols;
    };
    lp::ColumnGenerationSimplex simplex(std::vector<Rational>(m, Rational(1)), std::move(seed), std::move(unit));
    lp::ColumnGenerationOptions cg;
    cg.max_pivots = opt.max_pivots;
    const lp::ColumnGenerationResult res = simplex.solve(oracle, cg);
    if (res.status != lp::Status::Optimal) throw InvariantError("h optimizer LP not optimal although h = 0 is feasible");
    out.exact_pivots = res.pivots;
    h = res.duals;
    Rational sum = 0;
    for (const Rational& v : *h) sum += v;
    if (sum != res.objective) throw InvariantError("h optimizer: primal and dual objectives differ");
  }

  out.h = HFunction::piecewise(*h);
  out.objective = out.h.integral_exact(Rational(0), Rational(1));
  out.rho = 1 + 1 / (1 + out.objective);
  for (const Rational& z : grid) {
    const Rational f = eval_condition_exact(out.h, z);
    if (sgn(f) > 0) throw InvariantError("h optimizer returned an h violating a grid condition");
    if (sgn(f) == 0) ++out.tight_points;
  }

  const int fine = 10 * k;
  out.fine_grid_residual = -1e300;
  for (int j = 0; j <= fine; ++j)
    out.fine_grid_residual = std::max(out.fine_grid_residual, eval_condition_exact(out.h, ratio(j, fine)).get_d());
  out.supremum = condition_supremum(out.h);
  return out;
}

}  // namespace pathtsp
