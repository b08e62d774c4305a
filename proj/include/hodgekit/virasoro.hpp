#pragma once

#include <vector>

#include "hodgekit/combinatorics.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/rational.hpp"

namespace hodgekit {

/// Lower limit of the quadratic sum in L_n (n > 0). FromZero is the range
/// that satisfies the commutation relations and annihilates the tau function.
enum class QuadraticRange { FromZero, FromOne };

/// hbar^2 * coefficient * d/dt_a d/dt_b
struct QuadraticTerm {
  int a;
  int b;
  Rational coefficient;
};

/// Coefficient data of the Virasoro operator L_n, n >= -1:
///
///   L_n = sum_k linear(k) t_k d/dt_{n+k}  +  shift d/dt_{n+1}
///         + sum quadratic  +  constant  +  potential hbar^{-2} t_0^2
///
/// The shift term is the -delta_{k,1} part of (t_k - delta_{k,1}).
struct VirasoroOperator {
  int n = 0;
  int min_k = 0;
  Rational shift;
  std::vector<QuadraticTerm> quadratic;
  Rational constant;
  Rational potential;

  /// Coefficient of t_k d/dt_{n+k}; zero below min_k.
  Rational linear(int k) const {
    if (k < min_k) return 0;
    if (n == -1) return 1;
    return virasoro_coefficient(n, k, CoefficientFamily::FirstSum);
  }
};

inline VirasoroOperator virasoro_operator(int n, QuadraticRange range = QuadraticRange::FromZero) {
  if (n < -1) throw InvalidInput("Virasoro operators are defined for n >= -1");
  VirasoroOperator op;
  op.n = n;
  if (n == -1) {
    op.min_k = 1;  // sum_i t_{i+1} d/dt_i
    op.shift = -1;
    op.potential = Rational(1, 2);
    return op;
  }
  op.shift = -virasoro_coefficient(n, 1, CoefficientFamily::FirstSum);
  if (n == 0) {
    op.constant = Rational(1, 16);
    return op;
  }
  const int first = range == QuadraticRange::FromZero ? 0 : 1;
  for (int k = first; k <= n - 1; ++k) {
    Rational c = virasoro_coefficient(n, k, CoefficientFamily::SecondSum) / 2;
    if (k % 2 == 0) c = -c;  // (-1)^{k+1}
    op.quadratic.push_back({k, n - k - 1, c});
  }
  return op;
}

}  // namespace hodgekit
