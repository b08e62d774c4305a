#pragma once

#include <span>
#include <vector>

#include "hodgekit/errors.hpp"
#include "hodgekit/rational.hpp"

namespace hodgekit {

inline Integer factorial(long n) {
  if (n < 0) throw InvalidInput("factorial of a negative number");
  Integer out;
  mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
  return out;
}

inline Integer binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

/// total! / prod(k_i!); zero when the parts do not sum to total.
inline Integer multinomial(long total, std::span<const int> parts) {
  long sum = 0;
  for (int k : parts) {
    if (k < 0) return 0;
    sum += k;
  }
  if (sum != total) return 0;
  Integer out = factorial(total);
  for (int k : parts) out /= factorial(k);
  return out;
}

/// m!! for odd m >= -1, with (-1)!! = 1.
inline Rational odd_double_factorial(long m) {
  if (m < -1 || m % 2 == 0) throw InvalidInput("odd_double_factorial needs odd m >= -1");
  Integer out = 1;
  for (long j = m; j > 1; j -= 2) out *= j;
  return Rational(out);
}

enum class CoefficientFamily { FirstSum, SecondSum };

/// Gamma-function ratios of the Virasoro operators, evaluated as telescoping
/// products so they stay rational.
///   FirstSum:  Gamma(k+n+3/2)/Gamma(k+1/2) = prod_{j=0}^{n} (k + 1/2 + j),  n >= 0, k >= 0
///   SecondSum: Gamma(n-k+1/2)/Gamma(-k-1/2) = prod_{j=0}^{n} (-k - 1/2 + j), n >= 1, 0 <= k <= n-1
inline Rational virasoro_coefficient(long n, long k, CoefficientFamily family) {
  Rational out = 1;
  const Rational half(1, 2);
  if (family == CoefficientFamily::FirstSum) {
    if (n < 0 || k < 0) throw InvalidInput("first-sum coefficient needs n >= 0, k >= 0");
    for (long j = 0; j <= n; ++j) out *= Rational(k + j) + half;
  } else {
    if (n < 1 || k < 0 || k > n - 1) {
      throw InvalidInput("second-sum coefficient needs n >= 1, 0 <= k <= n-1");
    }
    for (long j = 0; j <= n; ++j) out *= Rational(j - k) - half;
  }
  return out;
}

}  // namespace hodgekit
