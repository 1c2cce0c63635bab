#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>

#include "pathtsp/errors.hpp"

namespace pathtsp {

using Rational = mpq_class;

/// Parses "p/q", "p" or a plain decimal such as "2.75" into a canonical rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw InputError("empty rational literal");
  const auto dot = s.find('.');
  Rational r;
  try {
    if (dot != std::string::npos) {
      if (s.find('/') != std::string::npos) throw InputError("bad rational literal '" + s + "'");
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      if (digits.empty() || digits == "-" || digits == "+") throw InputError("bad rational literal '" + s + "'");
      if (digits[0] == '+') digits.erase(0, 1);
      const std::size_t frac = s.size() - dot - 1;
      r = Rational(mpz_class(digits, 10), mpz_class(1));
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
      r /= Rational(den);
    } else {
      if (s[0] == '+') s.erase(0, 1);
      if (r.set_str(s, 10) != 0) throw InputError("bad rational literal '" + std::string(text) + "'");
      if (r.get_den() == 0) throw InputError("zero denominator in '" + s + "'");
    }
  } catch (const std::invalid_argument&) {
    throw InputError("bad rational literal '" + std::string(text) + "'");
  }
  r.canonicalize();
  return r;
}

/// Canonical p/q from machine integers.
inline Rational ratio(long p, long q) {
  if (q == 0) throw InputError("zero denominator");
  Rational r{mpz_class(p), mpz_class(q)};
  r.canonicalize();
  return r;
}

/// "p/q" with q omitted when 1.
inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

/// Conversion used by code templated on the number type.
template <typename Num>
Num from_rational(const Rational& r);

template <>
inline Rational from_rational<Rational>(const Rational& r) {
  return r;
}

template <>
inline double from_rational<double>(const Rational& r) {
  return r.get_d();
}

}  // namespace pathtsp
