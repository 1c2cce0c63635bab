#pragma once

// Exact two-phase simplex over GMP rationals.
//
// The model is brought into standard form (nonnegative columns, equality rows
// with slack/surplus columns, nonnegative right-hand sides). Every row starts
// with an identity column (slack or artificial) which is kept for the whole
// solve so that B^-1, and hence the duals, can be read off the final tableau.
// Entering columns use Dantzig's rule for a bounded number of pivots and then
// Bland's rule, which guarantees termination; ties always go to the smallest
// column index, so the result is a deterministic function of the model.

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathtsp/errors.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

struct Term {
  std::size_t var;
  Rational coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation rel = Relation::GreaterEqual;
  Rational rhs;
};

class Model {
 public:
  /// Bounds default to [0, +inf). std::nullopt means infinite.
  std::size_t add_variable(Rational objective = 0, std::optional<Rational> lo = Rational(0), std::optional<Rational> hi = std::nullopt) {
    if (lo && hi && *lo > *hi) throw InputError("variable bounds inconsistent (lo > hi)");
    objective_.push_back(std::move(objective));
    lower_.push_back(std::move(lo));
    upper_.push_back(std::move(hi));
    return objective_.size() - 1;
  }

  std::size_t add_row(Constraint row) {
    for (const Term& t : row.terms)
      if (t.var >= objective_.size()) throw InputError("row references undeclared variable " + std::to_string(t.var));
    rows_.push_back(std::move(row));
    return rows_.size() - 1;
  }

  std::size_t add_row(std::vector<Term> terms, Relation rel, Rational rhs) { return add_row(Constraint{std::move(terms), rel, std::move(rhs)}); }

  void set_sense(Sense s) { sense_ = s; }
  Sense sense() const { return sense_; }

  std::size_t variable_count() const { return objective_.size(); }
  std::size_t row_count() const { return rows_.size(); }
  const std::vector<Constraint>& rows() const { return rows_; }
  const Rational& objective(std::size_t j) const { return objective_[j]; }
  const std::optional<Rational>& lower(std::size_t j) const { return lower_[j]; }
  const std::optional<Rational>& upper(std::size_t j) const { return upper_[j]; }

 private:
  Sense sense_ = Sense::Minimize;
  std::vector<Rational> objective_;
  std::vector<std::optional<Rational>> lower_, upper_;
  std::vector<Constraint> rows_;
};

struct Outcome {
  Status status = Status::Infeasible;
  std::vector<Rational> primal;
  /// d(objective)/d(rhs) per row of the model, in the model's own sense.
  std::vector<Rational> dual;
  Rational objective;
  std::size_t pivots = 0;
};

struct Options {
  /// Dantzig pivots allowed before switching to Bland's rule.
  std::size_t dantzig_limit = 20000;
};

namespace detail {

class Tableau {
 public:
  // rows x (cols + 1); last column is the right-hand side.
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> reduced;  // reduced costs, last entry = -objective
  std::vector<std::size_t> basis;
  std::size_t cols = 0;
  std::size_t pivots = 0;

  void pivot(std::size_t pr, std::size_t pc) {
    std::vector<Rational>& prow = a[pr];
    const Rational inv = 1 / prow[pc];
    std::vector<std::size_t> nz;
    nz.reserve(cols + 1);
    for (std::size_t j = 0; j <= cols; ++j) {
      if (sgn(prow[j]) != 0) {
        prow[j] *= inv;
        nz.push_back(j);
      }
    }
    Rational factor;
    auto eliminate = [&](std::vector<Rational>& row) {
      if (sgn(row[pc]) == 0) return;
      factor = row[pc];
      for (std::size_t j : nz) row[j] -= factor * prow[j];
    };
    for (std::size_t r = 0; r < a.size(); ++r)
      if (r != pr) eliminate(a[r]);
    eliminate(reduced);
    basis[pr] = pc;
    ++pivots;
  }
};

}  // namespace detail

/// Solves the model exactly. Throws InputError on malformed models.
inline Outcome solve(const Model& model, const Options& opt = {}) {
  using detail::Tableau;
  const std::size_t nvar = model.variable_count();

  // Column mapping: user var -> (structural column, sign, offset) and free split.
  struct VarMap {
    std::size_t col;
    int sign;  // x = offset + sign * col  (+ for shift, - for flipped)
    Rational offset;
    std::optional<std::size_t> neg_col;  // free variables: x = col - neg_col
  };
  std::vector<VarMap> vmap(nvar);
  std::size_t nstruct = 0;
  struct BoundRow {
    std::size_t col;
    Rational width;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < nvar; ++j) {
    const auto& lo = model.lower(j);
    const auto& hi = model.upper(j);
    VarMap m{nstruct++, 1, Rational(0), std::nullopt};
    if (lo) {
      m.offset = *lo;
      if (hi) bound_rows.push_back({m.col, *hi - *lo});
    } else if (hi) {
      m.sign = -1;
      m.offset = *hi;
    } else {
      m.neg_col = nstruct++;
    }
    vmap[j] = std::move(m);
  }

  // Normalized rows over structural columns.
  struct NormRow {
    std::vector<std::pair<std::size_t, Rational>> coefs;
    Relation rel;
    Rational rhs;
    bool flipped = false;
  };
  std::vector<NormRow> rows;
  rows.reserve(model.row_count() + bound_rows.size());
  for (const Constraint& c : model.rows()) {
    NormRow nr{{}, c.rel, c.rhs};
    std::vector<Rational> dense(nstruct, 0);
    for (const Term& t : c.terms) {
      const VarMap& m = vmap[t.var];
      nr.rhs -= t.coef * m.offset;
      dense[m.col] += t.coef * m.sign;
      if (m.neg_col) dense[*m.neg_col] -= t.coef;
    }
    for (std::size_t k = 0; k < nstruct; ++k)
      if (sgn(dense[k]) != 0) nr.coefs.emplace_back(k, dense[k]);
    rows.push_back(std::move(nr));
  }
  for (const BoundRow& b : bound_rows) rows.push_back(NormRow{{{b.col, Rational(1)}}, Relation::LessEqual, b.width});
  for (NormRow& r : rows) {
    if (sgn(r.rhs) < 0) {
      r.rhs = -r.rhs;
      for (auto& [k, v] : r.coefs) v = -v;
      if (r.rel == Relation::LessEqual) r.rel = Relation::GreaterEqual;
      else if (r.rel == Relation::GreaterEqual) r.rel = Relation::LessEqual;
      r.flipped = true;
    }
  }

  // Column layout: structural | slack/surplus | artificial.
  const std::size_t m = rows.size();
  std::size_t nslack = 0, nart = 0;
  for (const NormRow& r : rows) {
    if (r.rel != Relation::Equal) ++nslack;
    if (r.rel != Relation::LessEqual) ++nart;
  }
  const std::size_t slack0 = nstruct, art0 = nstruct + nslack, ncols = art0 + nart;
  Tableau tab;
  tab.cols = ncols;
  tab.a.assign(m, std::vector<Rational>(ncols + 1, 0));
  tab.basis.assign(m, 0);
  std::vector<std::size_t> identity_col(m);
  {
    std::size_t s = slack0, a = art0;
    for (std::size_t i = 0; i < m; ++i) {
      auto& row = tab.a[i];
      for (const auto& [k, v] : rows[i].coefs) row[k] = v;
      row[ncols] = rows[i].rhs;
      switch (rows[i].rel) {
        case Relation::LessEqual:
          row[s] = 1;
          identity_col[i] = s++;
          break;
        case Relation::GreaterEqual:
          row[s++] = -1;
          row[a] = 1;
          identity_col[i] = a++;
          break;
        case Relation::Equal:
          row[a] = 1;
          identity_col[i] = a++;
          break;
      }
      tab.basis[i] = identity_col[i];
    }
  }

  auto is_artificial = [&](std::size_t col) { return col >= art0 && col < ncols; };

  auto load_objective = [&](const std::vector<Rational>& cost) {
    tab.reduced.assign(ncols + 1, 0);
    for (std::size_t j = 0; j < ncols; ++j) tab.reduced[j] = cost[j];
    for (std::size_t r = 0; r < m; ++r) {
      const Rational& cb = cost[tab.basis[r]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j <= ncols; ++j)
        if (sgn(tab.a[r][j]) != 0) tab.reduced[j] -= cb * tab.a[r][j];
    }
  };

  // Returns false if unbounded.
  auto run = [&](bool allow_artificial) {
    std::size_t local = 0;
    for (;;) {
      const bool bland = local >= opt.dantzig_limit;
      std::size_t enter = ncols;
      for (std::size_t j = 0; j < ncols; ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (sgn(tab.reduced[j]) >= 0) continue;
        if (enter == ncols) {
          enter = j;
          if (bland) break;
        } else if (tab.reduced[j] < tab.reduced[enter]) {
          enter = j;
        }
      }
      if (enter == ncols) return true;
      std::size_t leave = m;
      Rational best, ratio;
      for (std::size_t r = 0; r < m; ++r) {
        if (sgn(tab.a[r][enter]) <= 0) continue;
        ratio = tab.a[r][ncols] / tab.a[r][enter];
        if (leave == m || ratio < best || (ratio == best && tab.basis[r] < tab.basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == m) return false;
      tab.pivot(leave, enter);
      ++local;
    }
  };

  Outcome out;
  // Phase 1.
  if (nart > 0) {
    std::vector<Rational> cost(ncols, 0);
    for (std::size_t j = art0; j < ncols; ++j) cost[j] = 1;
    load_objective(cost);
    run(true);
    if (sgn(tab.reduced[ncols]) != 0) {  // -objective
      out.status = Status::Infeasible;
      out.pivots = tab.pivots;
      return out;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_artificial(tab.basis[r])) continue;
      for (std::size_t j = 0; j < art0; ++j) {
        if (sgn(tab.a[r][j]) != 0) {
          tab.pivot(r, j);
          break;
        }
      }
    }
  }

  // Phase 2.
  const bool maximize = model.sense() == Sense::Maximize;
  std::vector<Rational> cost(ncols, 0);
  Rational constant = 0;
  for (std::size_t j = 0; j < nvar; ++j) {
    const Rational c = maximize ? Rational(-model.objective(j)) : model.objective(j);
    const VarMap& vm = vmap[j];
    constant += c * vm.offset;
    cost[vm.col] += c * vm.sign;
    if (vm.neg_col) cost[*vm.neg_col] -= c;
  }
  load_objective(cost);
  if (!run(false)) {
    out.status = Status::Unbounded;
    out.pivots = tab.pivots;
    return out;
  }

  std::vector<Rational> colval(ncols, 0);
  for (std::size_t r = 0; r < m; ++r) colval[tab.basis[r]] = tab.a[r][ncols];
  out.status = Status::Optimal;
  out.primal.resize(nvar);
  for (std::size_t j = 0; j < nvar; ++j) {
    const VarMap& vm = vmap[j];
    out.primal[j] = vm.offset + vm.sign * colval[vm.col];
    if (vm.neg_col) out.primal[j] -= colval[*vm.neg_col];
  }
  Rational obj = constant;
  for (std::size_t j = 0; j < ncols; ++j) obj += cost[j] * colval[j];
  out.objective = maximize ? Rational(-obj) : obj;

  out.dual.assign(model.row_count(), 0);
  for (std::size_t i = 0; i < model.row_count(); ++i) {
    Rational y = 0;
    for (std::size_t r = 0; r < m; ++r) {
      const Rational& cb = cost[tab.basis[r]];
      if (sgn(cb) != 0 && sgn(tab.a[r][identity_col[i]]) != 0) y += cb * tab.a[r][identity_col[i]];
    }
    if (rows[i].flipped) y = -y;
    if (maximize) y = -y;
    out.dual[i] = y;
  }
  out.pivots = tab.pivots;
  return out;
}

/// Appends rows and re-solves. The result is identical to a cold solve of the augmented model.
inline Outcome resolve(Model& model, const std::vector<Constraint>& new_rows, const Options& opt = {}) {
  for (const Constraint& c : new_rows) model.add_row(c);
  return solve(model, opt);
}

}  // namespace pathtsp::lp
