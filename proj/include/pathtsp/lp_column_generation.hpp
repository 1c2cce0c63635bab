#pragma once

// Revised simplex with column generation.
//
// Solves   min c^T x  s.t.  A x = b, x >= 0,  b >= 0,
// where the columns of A are produced on demand by a pricing oracle. The basis
// inverse is stored explicitly (m x m), so each pivot costs O(m^2) regardless of
// how many columns exist. The ratio test is lexicographic on [x_B | B^-1], which
// rules out cycling for any entering rule; since an exact oracle only ever
// returns columns from a finite family, the method terminates.
//
// The number type is a template parameter. With Rational everything is exact.
// With double the solver is a heuristic: signs are taken with an absolute
// tolerance, and the result is meant to seed an exact run via set_basis().
//
// Rows not covered by a caller-supplied unit column start with an artificial
// variable; phase one drives the artificials to zero. Artificials that remain
// basic at level zero are pivoted out with ratio zero as soon as an entering
// column touches their row.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "pathtsp/errors.hpp"
#include "pathtsp/lp.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp::lp {

namespace detail {

inline int sign_of(const Rational& v) { return sgn(v); }
inline int sign_of(double v) { return v > 1e-11 ? 1 : (v < -1e-11 ? -1 : 0); }

// A reduced cost that makes a column worth entering.
inline bool improving(const Rational& d, double) { return sgn(d) < 0; }
inline bool improving(double d, double tolerance) { return d < -tolerance; }

}  // namespace detail

template <typename Num>
struct BasicColumn {
  std::vector<std::pair<std::size_t, Num>> entries;  ///< sparse, row-indexed
  Num cost;
  long tag = -1;  ///< caller's identifier, carried through unchanged
};

using Column = BasicColumn<Rational>;

/// Reduced cost c_j - pi^T a_j.
template <typename Num>
Num reduced_cost(const BasicColumn<Num>& col, const std::vector<Num>& pi) {
  Num d = col.cost;
  for (const auto& [r, v] : col.entries) d -= pi[r] * v;
  return d;
}

/// Called with the simplex multipliers pi (one per row) and whether phase one
/// is active. Columns must carry their true cost in both phases: phase one
/// prices them at zero itself, and pooled columns keep the cost they came with
/// when phase two starts. Returns candidate
/// columns; the solver enters the one with the most negative reduced cost per
/// unit of column norm.
template <typename Num>
using BasicPricingOracle = std::function<std::vector<BasicColumn<Num>>(const std::vector<Num>& pi, bool phase_one)>;
using PricingOracle = BasicPricingOracle<Rational>;

struct ColumnGenerationOptions {
  std::size_t max_pivots = 1000000;
  /// Stop after phase one (pure feasibility problems).
  bool feasibility_only = false;
  /// Floating point only: recompute B^-1 from scratch every this many pivots (0 = never).
  std::size_t refactor_every = 100;
  /// Floating point only: reduced costs above -tolerance count as nonnegative.
  double tolerance = 1e-9;
};

template <typename Num>
struct BasicColumnGenerationResult {
  Status status = Status::Infeasible;
  Num objective{};
  std::vector<Num> duals;  ///< pi = c_B B^-1
  std::vector<BasicColumn<Num>> columns;  ///< basic columns with positive value
  std::vector<Num> values;  ///< value per entry of `columns`
  std::vector<BasicColumn<Num>> basis;  ///< all basic columns, artificials excluded
  std::size_t pivots = 0;
  std::size_t oracle_calls = 0;
};

using ColumnGenerationResult = BasicColumnGenerationResult<Rational>;

template <typename Num>
class BasicColumnGenerationSimplex {
 public:
  using Col = BasicColumn<Num>;

  /// `seed` columns enter the pool up front; `unit_basis[r]`, when set, names a
  /// seed column equal to e_r that starts basic in row r.
  BasicColumnGenerationSimplex(std::vector<Num> rhs, std::vector<Col> seed, std::vector<std::optional<std::size_t>> unit_basis = {})
      : m_(rhs.size()), rhs_(std::move(rhs)), pool_(std::move(seed)) {
    for (const Num& v : rhs_)
      if (detail::sign_of(v) < 0) throw InputError("column generation needs a nonnegative right-hand side");
    unit_basis.resize(m_);
    binv_.assign(m_, std::vector<Num>(m_, Num(0)));
    basis_.assign(m_, kArtificial);
    xb_ = rhs_;
    for (std::size_t r = 0; r < m_; ++r) {
      binv_[r][r] = 1;
      if (unit_basis[r]) {
        const Col& c = pool_.at(*unit_basis[r]);
        if (c.entries.size() != 1 || c.entries[0].first != r || c.entries[0].second != 1)
          throw InputError("unit_basis column is not the unit vector of its row");
        basis_[r] = *unit_basis[r];
      }
    }
  }

  /// Replaces the basis by `cols` (exactly m columns) if they form a primal
  /// feasible basis. Returns false, leaving the solver untouched, otherwise.
  bool set_basis(const std::vector<Col>& cols) {
    if (cols.size() != m_) return false;
    std::vector<const Col*> ptr;
    for (const Col& c : cols) ptr.push_back(&c);
    if (!factor(ptr)) return false;
    for (std::size_t j = 0; j < m_; ++j) {
      pool_.push_back(cols[j]);
      basis_[j] = pool_.size() - 1;
    }
    return true;
  }

  BasicColumnGenerationResult<Num> solve(const BasicPricingOracle<Num>& oracle, const ColumnGenerationOptions& opt = {}) {
    BasicColumnGenerationResult<Num> out;
    bool have_artificial = false;
    for (std::size_t b : basis_) have_artificial |= (b == kArtificial);
    if (have_artificial) {
      phase_one_ = true;
      if (!iterate(oracle, opt, out)) throw InvariantError("phase one cannot be unbounded");
      if (detail::sign_of(objective()) != 0) {
        out.status = Status::Infeasible;
        finish(out);
        return out;
      }
    }
    phase_one_ = false;
    if (opt.feasibility_only) {
      out.status = Status::Optimal;
      finish(out);
      return out;
    }
    if (!iterate(oracle, opt, out)) {
      out.status = Status::Unbounded;
      finish(out);
      return out;
    }
    if constexpr (std::is_same_v<Num, double>) refactor();
    out.status = Status::Optimal;
    finish(out);
    return out;
  }

 private:
  static constexpr std::size_t kArtificial = static_cast<std::size_t>(-1);

  // Computes B^-1 and x_B for the basis whose j-th column is cols[j] (nullptr
  // for an artificial, i.e. the unit vector of row j). Leaves the state
  // untouched and returns false if B is singular or x_B has a negative entry.
  bool factor(const std::vector<const Col*>& cols) {
    // Gauss-Jordan on [B | I] with partial pivoting.
    std::vector<std::vector<Num>> a(m_, std::vector<Num>(2 * m_, Num(0)));
    for (std::size_t j = 0; j < m_; ++j) {
      if (!cols[j]) {
        a[j][j] = 1;
        continue;
      }
      for (const auto& [r, v] : cols[j]->entries) {
        if (r >= m_) return false;
        a[r][j] += v;
      }
    }
    for (std::size_t r = 0; r < m_; ++r) a[r][m_ + r] = 1;
    for (std::size_t j = 0; j < m_; ++j) {
      std::optional<std::size_t> p;
      for (std::size_t r = j; r < m_; ++r)
        if (detail::sign_of(a[r][j]) != 0 && (!p || std::abs(to_double_(a[r][j])) > std::abs(to_double_(a[*p][j])))) p = r;
      if (!p) return false;
      std::swap(a[j], a[*p]);
      const Num inv = 1 / a[j][j];
      for (Num& v : a[j])
        if (detail::sign_of(v) != 0) v *= inv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == j || detail::sign_of(a[r][j]) == 0) continue;
        const Num f = a[r][j];
        for (std::size_t c = j; c < 2 * m_; ++c)
          if (detail::sign_of(a[j][c]) != 0) a[r][c] -= f * a[j][c];
      }
    }
    // Row j of the reduced system now belongs to basic column j.
    std::vector<std::vector<Num>> binv(m_, std::vector<Num>(m_));
    std::vector<Num> xb(m_, Num(0));
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t i = 0; i < m_; ++i) {
        binv[j][i] = a[j][m_ + i];
        if (detail::sign_of(binv[j][i]) != 0) xb[j] += binv[j][i] * rhs_[i];
      }
      if (detail::sign_of(xb[j]) < 0) return false;
      if constexpr (std::is_same_v<Num, double>) xb[j] = std::max(xb[j], 0.0);
    }
    binv_ = std::move(binv);
    xb_ = std::move(xb);
    return true;
  }

  // Recomputes B^-1 from the basic columns; only used with floating point.
  void refactor() {
    std::vector<const Col*> cols(m_, nullptr);
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] != kArtificial) cols[r] = &pool_[basis_[r]];
    // On failure (x_B slightly negative after rounding) the updated inverse is kept.
    factor(cols);
  }

  static double to_double_(const Num& v) {
    if constexpr (std::is_same_v<Num, double>)
      return v;
    else
      return v.get_d();
  }

  Num cost_of(std::size_t basic) const {
    if (basic == kArtificial) return phase_one_ ? Num(1) : Num(0);
    return phase_one_ ? Num(0) : pool_[basic].cost;
  }

  Num objective() const {
    Num z = 0;
    for (std::size_t r = 0; r < m_; ++r) z += cost_of(basis_[r]) * xb_[r];
    return z;
  }

  std::vector<Num> multipliers() const {
    std::vector<Num> pi(m_, Num(0));
    for (std::size_t r = 0; r < m_; ++r) {
      const Num cb = cost_of(basis_[r]);
      if (detail::sign_of(cb) == 0) continue;
      for (std::size_t i = 0; i < m_; ++i)
        if (detail::sign_of(binv_[r][i]) != 0) pi[i] += cb * binv_[r][i];
    }
    return pi;
  }

  Num phase_cost(const Col& c) const { return phase_one_ ? Num(0) : c.cost; }

  // Reduced cost scaled by the column norm; only used to choose among candidates.
  double score(const Col& c, const std::vector<Num>& pi, Num& d, double tolerance) const {
    d = phase_cost(c);
    double norm = 1;
    for (const auto& [r, v] : c.entries) {
      d -= pi[r] * v;
      norm += to_double_(v) * to_double_(v);
    }
    return detail::improving(d, tolerance) ? to_double_(d) / std::sqrt(norm) : 0.0;
  }

  // Returns false on unboundedness.
  bool iterate(const BasicPricingOracle<Num>& oracle, const ColumnGenerationOptions& opt, BasicColumnGenerationResult<Num>& out) {
    Num d;
    for (;;) {
      const std::vector<Num> pi = multipliers();
      std::optional<Col> enter;
      double best = 0;
      std::optional<std::size_t> enter_pool;
      ++out.oracle_calls;
      for (Col& c : oracle(pi, phase_one_)) {
        if (const double s = score(c, pi, d, opt.tolerance); s < best) {
          best = s;
          enter = std::move(c);
        }
      }
      if (!enter) {
        // The oracle may not know the seed columns; price the pool before stopping.
        for (std::size_t j = 0; j < pool_.size(); ++j) {
          if (const double s = score(pool_[j], pi, d, opt.tolerance); s < best) {
            best = s;
            enter_pool = j;
          }
        }
        if (!enter_pool) return true;
      }
      std::size_t q;
      if (enter_pool) {
        q = *enter_pool;
      } else {
        pool_.push_back(std::move(*enter));
        q = pool_.size() - 1;
      }
      if (out.pivots >= opt.max_pivots) throw ResourceError("column generation exceeded its pivot limit");
      if (!pivot_in(q)) return false;
      ++out.pivots;
      if constexpr (std::is_same_v<Num, double>)
        if (opt.refactor_every > 0 && out.pivots % opt.refactor_every == 0) refactor();
    }
  }

  // Lexicographic ratio test and basis update. Returns false if the column is unbounded.
  bool pivot_in(std::size_t q) {
    std::vector<Num> alpha(m_, Num(0));
    for (const auto& [r, v] : pool_[q].entries)
      for (std::size_t i = 0; i < m_; ++i)
        if (detail::sign_of(binv_[i][r]) != 0) alpha[i] += binv_[i][r] * v;

    std::optional<std::size_t> leave;
    if (!phase_one_) {
      // Zero-level artificials leave first.
      for (std::size_t r = 0; r < m_ && !leave; ++r)
        if (basis_[r] == kArtificial && detail::sign_of(alpha[r]) != 0) leave = r;
    }
    if (!leave) {
      for (std::size_t r = 0; r < m_; ++r) {
        if (detail::sign_of(alpha[r]) <= 0) continue;
        if (!leave || lex_less(r, *leave, alpha)) leave = r;
      }
    }
    if (!leave) return false;
    const std::size_t pr = *leave;
    const Num inv = 1 / alpha[pr];
    std::vector<std::size_t> nz;
    for (std::size_t i = 0; i < m_; ++i) {
      if (detail::sign_of(binv_[pr][i]) != 0) {
        binv_[pr][i] *= inv;
        nz.push_back(i);
      } else {
        binv_[pr][i] = 0;
      }
    }
    xb_[pr] *= inv;
    Num f;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == pr || detail::sign_of(alpha[r]) == 0) continue;
      f = alpha[r];
      for (std::size_t i : nz) binv_[r][i] -= f * binv_[pr][i];
      xb_[r] -= f * xb_[pr];
    }
    if constexpr (std::is_same_v<Num, double>)
      for (Num& v : xb_)
        if (v < 0 && v > -1e-9) v = 0;
    basis_[pr] = q;
    return true;
  }

  // Row a before row b in the lexicographic order of [x_B | B^-1] / alpha.
  bool lex_less(std::size_t a, std::size_t b, const std::vector<Num>& alpha) const {
    Num lhs, rhs;
    auto cmp = [&](const Num& va, const Num& vb) {
      lhs = va * alpha[b];
      rhs = vb * alpha[a];
      return detail::sign_of(Num(lhs - rhs));
    };
    if (int c = cmp(xb_[a], xb_[b]); c != 0) return c < 0;
    for (std::size_t i = 0; i < m_; ++i)
      if (int c = cmp(binv_[a][i], binv_[b][i]); c != 0) return c < 0;
    return a < b;
  }

  void finish(BasicColumnGenerationResult<Num>& out) const {
    out.objective = objective();
    out.duals = multipliers();
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] == kArtificial) continue;
      out.basis.push_back(pool_[basis_[r]]);
      if (detail::sign_of(xb_[r]) == 0) continue;
      out.columns.push_back(pool_[basis_[r]]);
      out.values.push_back(xb_[r]);
    }
  }

  std::size_t m_;
  std::vector<Num> rhs_;
  std::vector<Col> pool_;
  std::vector<std::vector<Num>> binv_;
  std::vector<std::size_t> basis_;
  std::vector<Num> xb_;
  bool phase_one_ = false;
};

using ColumnGenerationSimplex = BasicColumnGenerationSimplex<Rational>;

}  // namespace pathtsp::lp
