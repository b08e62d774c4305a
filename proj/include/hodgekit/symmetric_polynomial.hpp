#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hodgekit/budget.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/linear_system.hpp"
#include "hodgekit/partition.hpp"
#include "hodgekit/rational.hpp"

namespace hodgekit {

/// Symmetric polynomial in n variables in the monomial symmetric basis.
/// Keys are exponent vectors sorted non-increasing (zeros allowed).
struct SymmetricPolynomial {
  int n = 0;
  std::map<std::vector<int>, Rational> coefficients;

  static int degree_of(const std::vector<int>& exponent) {
    int s = 0;
    for (int x : exponent) s += x;
    return s;
  }

  /// m_lambda(x): sum over the distinct rearrangements of lambda.
  static Rational monomial_symmetric(const std::vector<int>& lambda, const std::vector<Rational>& x) {
    std::vector<int> e = lambda;
    std::sort(e.begin(), e.end());
    Rational total = 0;
    do {
      Rational term = 1;
      for (std::size_t i = 0; i < e.size(); ++i) term *= pow(x[i], e[i]);
      total += term;
    } while (std::next_permutation(e.begin(), e.end()));
    return total;
  }

  Rational operator()(const std::vector<Rational>& x) const {
    if (static_cast<int>(x.size()) != n) throw InvalidInput("wrong number of arguments");
    Rational total = 0;
    for (const auto& [lambda, c] : coefficients) total += c * monomial_symmetric(lambda, x);
    return total;
  }

  Rational coefficient(std::vector<int> exponent) const {
    std::sort(exponent.begin(), exponent.end(), std::greater<>());
    auto it = coefficients.find(exponent);
    return it == coefficients.end() ? Rational(0) : it->second;
  }

  /// Degrees that carry a nonzero coefficient.
  std::vector<int> degrees() const {
    std::vector<int> out;
    for (const auto& [lambda, c] : coefficients) {
      if (c != 0) out.push_back(degree_of(lambda));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

/// Outcome of an exact least-squares-free fit: either every sample is
/// reproduced, or the first contradicting sample is named.
struct SymmetricFit {
  enum class Status { Ok, RankDeficient, TooFewSamples, Inconsistent };
  Status status = Status::Ok;
  SymmetricPolynomial polynomial;
  int unknowns = 0;
  int samples = 0;
  int rank = 0;
  std::string detail;
};

/// Fit the monomial-symmetric coefficients of every degree in `degrees` to
/// exact samples. At least ceil(1.2 * unknowns) samples are required; the
/// samples beyond the rank must then be reproduced exactly.
inline SymmetricFit fit_symmetric(int n, const std::vector<int>& degrees,
                                  const std::vector<std::pair<std::vector<int>, Rational>>& samples) {
  SymmetricFit fit;
  fit.polynomial.n = n;
  std::vector<std::vector<int>> basis;
  for (int deg : degrees) {
    for (auto& e : exponent_partitions(deg, n)) basis.push_back(e);
  }
  fit.unknowns = static_cast<int>(basis.size());
  fit.samples = static_cast<int>(samples.size());
  if (10L * fit.samples < 12L * fit.unknowns) {
    fit.status = SymmetricFit::Status::TooFewSamples;
    fit.detail = std::to_string(fit.samples) + " samples for " + std::to_string(fit.unknowns) +
                 " unknowns; at least 20% overdetermination is required";
    return fit;
  }
  ExactEchelon system(fit.unknowns);
  for (const auto& [point, value] : samples) {
    budget::checkpoint();
    if (static_cast<int>(point.size()) != n) throw InvalidInput("sample point has the wrong length");
    std::vector<Rational> x(point.begin(), point.end());
    SparseRow row;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      Rational v = SymmetricPolynomial::monomial_symmetric(basis[j], x);
      if (v != 0) row[static_cast<int>(j)] = v;
    }
    if (system.add_row(std::move(row), value) == ExactEchelon::Outcome::Inconsistent && fit.status == SymmetricFit::Status::Ok) {
      fit.status = SymmetricFit::Status::Inconsistent;
      std::string p;
      for (std::size_t i = 0; i < point.size(); ++i) p += (i ? "," : "") + std::to_string(point[i]);
      fit.detail = "sample (" + p + ") = " + to_string(value) + " contradicts the other samples";
    }
  }
  fit.rank = system.rank();
  if (fit.status == SymmetricFit::Status::Inconsistent) return fit;
  if (fit.rank < fit.unknowns) {
    fit.status = SymmetricFit::Status::RankDeficient;
    fit.detail = "rank " + std::to_string(fit.rank) + " < " + std::to_string(fit.unknowns) + " unknowns";
    return fit;
  }
  auto values = system.determined_values();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (*values[j] != 0) fit.polynomial.coefficients.emplace(basis[j], *values[j]);
  }
  return fit;
}

}  // namespace hodgekit
