#pragma once

// Weight functions h: [0,1] -> [0,1] weighting the narrow cuts, the feasibility
// condition
//
//   f_h(z) = int_z^1 max{0, h(s)(1+z) - 1} ds + int_0^z (h(s)(1-z) - 1) ds <= 0,
//
// and the resulting ratio rho(h) = 1 + 1/(1 + int_0^1 h).
//
// Three representations: the closed form 4/(4+s), a constant, and a
// piecewise-constant function on m uniform buckets. The latter two are handled
// in exact rational arithmetic; the closed form in double precision.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pathtsp/errors.hpp"
#include "pathtsp/rational.hpp"

namespace pathtsp {

class HFunction {
 public:
  enum class Kind { Default, Constant, Piecewise };

  /// h(s) = 4/(4+s).
  static HFunction default_h() { return HFunction(Kind::Default, {}); }

  static HFunction constant(Rational value) { return HFunction(Kind::Constant, {std::move(value)}); }

  /// Bucket i covers [i/m, (i+1)/m).
  static HFunction piecewise(std::vector<Rational> buckets) {
    if (buckets.empty()) throw InputError("piecewise h needs at least one bucket");
    return HFunction(Kind::Piecewise, std::move(buckets));
  }

  Kind kind() const { return kind_; }
  bool is_exact() const { return kind_ != Kind::Default; }
  const std::vector<Rational>& buckets() const { return buckets_; }
  int bucket_count() const { return static_cast<int>(buckets_.size()); }

  std::string describe() const {
    switch (kind_) {
      case Kind::Default: return "default 4/(4+sigma)";
      case Kind::Constant: return "const:" + to_string(buckets_[0]);
      case Kind::Piecewise: return "piecewise:" + std::to_string(buckets_.size()) + " buckets";
    }
    return "?";
  }

  double operator()(double sigma) const {
    if (kind_ == Kind::Default) return 4.0 / (4.0 + sigma);
    const int m = bucket_count();
    const int i = std::clamp(static_cast<int>(std::floor(sigma * m)), 0, m - 1);
    return buckets_[i].get_d();
  }

  /// int_a^b h, 0 <= a <= b <= 1.
  double integral(double a, double b) const {
    if (b <= a) return 0.0;
    if (kind_ == Kind::Default) return 4.0 * std::log((4.0 + b) / (4.0 + a));
    double total = 0.0;
    const int m = bucket_count();
    for (int i = 0; i < m; ++i) {
      const double lo = std::max(a, double(i) / m), hi = std::min(b, double(i + 1) / m);
      if (hi > lo) total += (hi - lo) * buckets_[i].get_d();
    }
    return total;
  }

  Rational integral_exact(const Rational& a, const Rational& b) const {
    require_exact();
    Rational total = 0;
    if (b <= a) return total;
    const int m = bucket_count();
    for (int i = 0; i < m; ++i) {
      const Rational lo = std::max(a, ratio(i, m)), hi = std::min(b, ratio(i + 1, m));
      if (hi > lo) total += (hi - lo) * buckets_[i];
    }
    return total;
  }

  /// int_a^b max{0, h(s)(1+z) - 1} ds.
  double positive_part_integral(double a, double b, double z) const {
    if (b <= a) return 0.0;
    if (kind_ == Kind::Default) {
      // 4(1+z)/(4+s) > 1 iff s < 4z.
      const double hi = std::min(b, 4.0 * z);
      if (hi <= a) return 0.0;
      return 4.0 * (1.0 + z) * std::log((4.0 + hi) / (4.0 + a)) - (hi - a);
    }
    double total = 0.0;
    const int m = bucket_count();
    for (int i = 0; i < m; ++i) {
      const double lo = std::max(a, double(i) / m), hi = std::min(b, double(i + 1) / m);
      const double excess = buckets_[i].get_d() * (1.0 + z) - 1.0;
      if (hi > lo && excess > 0) total += (hi - lo) * excess;
    }
    return total;
  }

  Rational positive_part_integral_exact(const Rational& a, const Rational& b, const Rational& z) const {
    require_exact();
    Rational total = 0;
    if (b <= a) return total;
    const int m = bucket_count();
    Rational excess;
    for (int i = 0; i < m; ++i) {
      const Rational lo = std::max(a, ratio(i, m)), hi = std::min(b, ratio(i + 1, m));
      excess = buckets_[i] * (1 + z) - 1;
      if (hi > lo && sgn(excess) > 0) total += (hi - lo) * excess;
    }
    return total;
  }

  /// Checks 0 <= h <= 1 on every bucket (the closed form satisfies it).
  bool in_range() const {
    for (const Rational& v : buckets_)
      if (v < 0 || v > 1) return false;
    return true;
  }

 private:
  HFunction(Kind k, std::vector<Rational> b) : kind_(k), buckets_(std::move(b)) {
    if (!in_range()) throw InputError("h values must lie in [0,1]");
  }

  void require_exact() const {
    if (!is_exact()) throw InputError("exact evaluation needs a constant or piecewise-constant h");
  }

  Kind kind_;
  std::vector<Rational> buckets_;
};

/// int_0^1 h.
inline double h_integral(const HFunction& h) { return h.integral(0.0, 1.0); }

/// Left-hand side f_h(z) of the feasibility condition.
inline double eval_condition(const HFunction& h, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw InputError("z must lie in [0,1]");
  return h.positive_part_integral(z, 1.0, z) + (1.0 - z) * h.integral(0.0, z) - z;
}

inline Rational eval_condition_exact(const HFunction& h, const Rational& z) {
  if (z < 0 || z > 1) throw InputError("z must lie in [0,1]");
  return h.positive_part_integral_exact(z, Rational(1), z) + (1 - z) * h.integral_exact(Rational(0), z) - z;
}

/// rho(h) = 1 + 1/(1 + int h).
inline double rho_of_h(const HFunction& h) { return 1.0 + 1.0 / (1.0 + h_integral(h)); }

inline Rational rho_of_h_exact(const HFunction& h) {
  return 1 + 1 / (1 + h.integral_exact(Rational(0), Rational(1)));
}

/// The bound for the closed-form h: 1 + 1/(1 + 4 ln(5/4)).
inline double rho_star() { return 1.0 + 1.0 / (1.0 + 4.0 * std::log(1.25)); }

struct ConditionMaximum {
  Rational value;  ///< sup_{z in [0,1]} f_h(z)
  Rational argmax;
};

/// Exact supremum of f_h over [0,1] for a constant or piecewise-constant h.
/// Between consecutive breakpoints (bucket boundaries and the thresholds
/// z = 1/h_i - 1) f_h is a quadratic polynomial, so its maximum on each piece is
/// attained at an endpoint or at the rational vertex.
inline ConditionMaximum condition_supremum(const HFunction& h) {
  if (!h.is_exact()) throw InputError("condition_supremum needs a constant or piecewise-constant h");
  const int m = h.bucket_count();
  std::vector<Rational> pts;
  for (int i = 0; i <= m; ++i) pts.push_back(ratio(i, m));
  for (const Rational& v : h.buckets()) {
    if (sgn(v) == 0) continue;
    Rational z = 1 / v - 1;
    if (z > 0 && z < 1) pts.push_back(z);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  ConditionMaximum best{eval_condition_exact(h, pts.front()), pts.front()};
  auto consider = [&](const Rational& z, const Rational& fz) {
    if (fz > best.value) best = {fz, z};
  };
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    const Rational& l = pts[p];
    const Rational& r = pts[p + 1];
    const Rational mid = (l + r) / 2;
    const Rational f0 = eval_condition_exact(h, l), f1 = eval_condition_exact(h, mid), f2 = eval_condition_exact(h, r);
    consider(l, f0);
    consider(r, f2);
    // f(l + u (r-l)/2) = f0 + B u + A u^2 for u in [0,2].
    const Rational A = (f0 - 2 * f1 + f2) / 2;
    const Rational B = f1 - f0 - A;
    if (sgn(A) < 0) {
      const Rational u = -B / (2 * A);
      if (u > 0 && u < 2) {
        const Rational z = l + u * (r - l) / 2;
        consider(z, eval_condition_exact(h, z));
      }
    }
  }
  return best;
}

/// Evaluation of the closed-form inequalities used for h(s) = 4/(4+s):
///   g(z)  = (1+z) ln((4z+4)/(z+4)) + (1-z) ln((z+4)/4) - z   <= 0,
///   g'(z) = ln(16(z+1)/(z+4)^2) - 2z/(z+4)  <= -3z^2/(z+4)^2 <= 0.
struct DefaultHInequalities {
  bool passed = false;
  double max_function = 0;
  double max_derivative = 0;
  double max_bound = 0;           ///< max of -3z^2/(z+4)^2
  double max_derivative_gap = 0;  ///< max of g'(z) - bound(z); <= 0 by ln x <= x - 1
  double value_at_zero = 0;
  double value_at_one = 0;
};

inline double default_h_function(double z) {
  return (1.0 + z) * std::log((4.0 * z + 4.0) / (z + 4.0)) + (1.0 - z) * std::log((z + 4.0) / 4.0) - z;
}
inline double default_h_derivative(double z) {
  return std::log(16.0 * (z + 1.0) / ((z + 4.0) * (z + 4.0))) - 2.0 * z / (z + 4.0);
}
inline double default_h_derivative_bound(double z) { return -3.0 * z * z / ((z + 4.0) * (z + 4.0)); }

inline DefaultHInequalities check_default_h_inequalities(int grid_points, double tol = 1e-12) {
  if (grid_points < 2) throw InputError("grid needs at least 2 points");
  DefaultHInequalities out;
  out.max_function = out.max_derivative = out.max_bound = out.max_derivative_gap = -1e300;
  for (int i = 0; i < grid_points; ++i) {
    const double z = double(i) / (grid_points - 1);
    const double g = default_h_function(z), d = default_h_derivative(z), b = default_h_derivative_bound(z);
    out.max_function = std::max(out.max_function, g);
    out.max_derivative = std::max(out.max_derivative, d);
    out.max_bound = std::max(out.max_bound, b);
    out.max_derivative_gap = std::max(out.max_derivative_gap, d - b);
  }
  out.value_at_zero = default_h_function(0.0);
  out.value_at_one = default_h_function(1.0);
  out.passed = out.max_function <= tol && out.max_derivative <= tol && out.max_bound <= 0.0 && out.max_derivative_gap <= tol;
  return out;
}

}  // namespace pathtsp
