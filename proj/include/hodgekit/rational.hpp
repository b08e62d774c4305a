#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <string>
#include <string_view>

#include "hodgekit/errors.hpp"

namespace hodgekit {

using Integer = mpz_class;
/// Exact rational; mpq_class keeps every arithmetic result in lowest terms
/// with a positive denominator.
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw InvalidInput("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational make_rational(long num, long den = 1) {
  return make_rational(Integer(num), Integer(den));
}

/// Canonical "p/q" form; the "/1" is never omitted.
inline std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

namespace detail {
inline Integer parse_integer(std::string_view text, bool allow_sign) {
  if (text.empty()) throw InvalidInput("empty integer");
  std::size_t start = 0;
  if (allow_sign && (text[0] == '-' || text[0] == '+')) start = 1;
  if (start == text.size()) throw InvalidInput("malformed integer '" + std::string(text) + "'");
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw InvalidInput("malformed integer '" + std::string(text) + "'");
    }
  }
  std::string digits(text[0] == '+' ? text.substr(1) : text);
  return Integer(digits, 10);
}
}  // namespace detail

/// Accepts "p", "p/q" and "-p/q". Result is canonicalised.
inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return Rational(detail::parse_integer(text, true));
  }
  Integer num = detail::parse_integer(text.substr(0, slash), true);
  Integer den = detail::parse_integer(text.substr(slash + 1), false);
  return make_rational(num, den);
}

/// Strict form used by serialised stores: must be exactly to_string(value).
inline Rational parse_canonical_rational(std::string_view text) {
  if (text.find('/') == std::string_view::npos) {
    throw InvalidInput("value '" + std::string(text) + "' is not of the form p/q");
  }
  Rational q = parse_rational(text);
  if (to_string(q) != text) {
    throw InvalidInput("value '" + std::string(text) + "' is not in lowest terms");
  }
  return q;
}

inline Rational pow(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base == 0) throw InvalidInput("zero to a negative power");
    Rational inv = 1 / base;
    return pow(inv, -exponent);
  }
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  return out;
}

inline Integer pow(const Integer& base, unsigned long exponent) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

inline bool is_perfect_square(const Rational& q) {
  return q >= 0 && mpz_perfect_square_p(q.get_num_mpz_t()) != 0 &&
         mpz_perfect_square_p(q.get_den_mpz_t()) != 0;
}

inline Rational rational_sqrt(const Rational& q) {
  if (!is_perfect_square(q)) throw InvalidInput("not a rational square");
  Integer n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  return make_rational(n, d);
}

}  // namespace hodgekit
