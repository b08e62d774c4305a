#pragma once

// Hodge integrals from single Hurwitz numbers.
//
// The normalized number P^g(alpha) = H^g_alpha / (r! prod alpha_i^alpha_i / alpha_i!)
// is a symmetric polynomial whose coefficient of alpha^a is
// (-1)^k <psi^a lambda_k>_g with k = 3g - 3 + n - |a|.

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "hodgekit/combinatorics.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/hurwitz.hpp"
#include "hodgekit/symmetric_polynomial.hpp"
#include "hodgekit/witten.hpp"

namespace hodgekit {

inline void require_stable(int g, int n) {
  if (g < 0 || n < 1 || 2 * g - 2 + n <= 0) {
    throw InvalidInput("unstable (g,n) = (" + std::to_string(g) + "," + std::to_string(n) + ")");
  }
}

/// Degree band [2g-3+n, 3g-3+n] of the single Hurwitz polynomial (clamped at 0).
inline std::pair<int, int> elsv_band(int g, int n) { return {std::max(0, 2 * g - 3 + n), 3 * g - 3 + n}; }

inline Rational elsv_prefactor(int g, const Partition& alpha) {
  Rational pre(factorial(single_hurwitz_r(g, alpha)));
  for (int a : alpha.parts()) pre *= make_rational(pow(Integer(a), static_cast<unsigned long>(a)), factorial(a));
  return pre;
}

inline Rational normalized_single_hurwitz(int g, const Partition& alpha,
                                          HurwitzEngine& engine = default_hurwitz_engine()) {
  require_stable(g, alpha.length());
  return single_hurwitz(g, alpha, engine) / elsv_prefactor(g, alpha);
}

/// Fit P^g over the grid. All degrees 0..3g-3+n are unknowns, so confinement
/// to the band is a measured property: a nonzero coefficient below the band
/// is a polynomiality violation.
inline SymmetricPolynomial interpolate_hurwitz_polynomial(int g, int n, const std::vector<Partition>& grid,
                                                          HurwitzEngine& engine = default_hurwitz_engine()) {
  require_stable(g, n);
  const auto [lo, hi] = elsv_band(g, n);
  std::vector<int> degrees;
  for (int deg = 0; deg <= hi; ++deg) degrees.push_back(deg);
  std::vector<std::pair<std::vector<int>, Rational>> samples;
  for (const auto& alpha : grid) {
    if (alpha.length() != n) throw InvalidInput("grid partition " + alpha.str() + " does not have " + std::to_string(n) + " parts");
    samples.emplace_back(alpha.parts(), normalized_single_hurwitz(g, alpha, engine));
  }
  SymmetricFit fit = fit_symmetric(n, degrees, samples);
  switch (fit.status) {
    case SymmetricFit::Status::Ok:
      break;
    case SymmetricFit::Status::Inconsistent:
      throw PolynomialityViolation("no polynomial of degree <= " + std::to_string(hi) + " fits: " + fit.detail);
    case SymmetricFit::Status::RankDeficient:
    case SymmetricFit::Status::TooFewSamples:
      throw DegenerateGrid(fit.detail);
  }
  for (int deg : fit.polynomial.degrees()) {
    if (deg < lo) {
      throw PolynomialityViolation("nonzero component in degree " + std::to_string(deg) + " below the band [" +
                                   std::to_string(lo) + "," + std::to_string(hi) + "]");
    }
  }
  return fit.polynomial;
}

/// Default grid: all n-part partitions with parts <= max_part.
inline std::vector<Partition> elsv_grid(int n, int max_part) { return bounded_partitions(n, max_part); }

struct HodgeIntegralTable {
  int g = 0;
  int n = 0;
  /// (a ascending, k) -> <psi^a lambda_k>_g
  std::map<std::pair<std::vector<int>, int>, Rational> entries;

  Rational at(std::vector<int> a, int k) const {
    std::sort(a.begin(), a.end());
    auto it = entries.find({a, k});
    if (it == entries.end()) throw InvalidInput("no such Hodge integral in the table");
    return it->second;
  }
};

inline HodgeIntegralTable extract_hodge_integrals(const SymmetricPolynomial& poly, int g, int n) {
  require_stable(g, n);
  if (poly.n != n) throw InvalidInput("polynomial has the wrong number of variables");
  const int dim = 3 * g - 3 + n;
  for (const auto& [lambda, c] : poly.coefficients) {
    const int k = dim - SymmetricPolynomial::degree_of(lambda);
    if (c != 0 && (k < 0 || k > g)) {
      throw IntegrityError("coefficient outside the admissible (a,k) lattice at degree " +
                           std::to_string(SymmetricPolynomial::degree_of(lambda)));
    }
  }
  HodgeIntegralTable table{g, n, {}};
  for (int k = 0; k <= std::min(g, dim); ++k) {
    for (auto& e : exponent_partitions(dim - k, n)) {
      Rational v = poly.coefficient(e);
      if (k % 2) v = -v;
      std::vector<int> a(e.rbegin(), e.rend());
      table.entries.emplace(std::make_pair(a, k), v);
    }
  }
  return table;
}

/// Entries with k = 0 that differ from the recursion's correlators.
inline std::vector<std::vector<int>> witten_mismatches(const HodgeIntegralTable& table, IntersectionNumbers& numbers) {
  std::vector<std::vector<int>> out;
  for (const auto& [key, v] : table.entries) {
    if (key.second != 0) continue;
    if (numbers.correlator(table.g, key.first) != v) out.push_back(key.first);
  }
  return out;
}

struct LambdaGReport {
  struct Entry {
    std::vector<int> b;
    Rational value;
    Integer multinomial;
    bool match = false;
  };
  int g = 0;
  int n = 0;
  Rational c_g;
  bool all_match = true;
  std::vector<Entry> entries;
};

/// <psi^b lambda_g> = multinomial(2g-3+n; b) c_g with one shared c_g. The
/// constant is the most common ratio, so a single corrupted entry is the one
/// flagged.
inline LambdaGReport check_lambda_g(const HodgeIntegralTable& table) {
  LambdaGReport report;
  report.g = table.g;
  report.n = table.n;
  const int total = 2 * table.g - 3 + table.n;
  std::map<Rational, int> votes;
  for (const auto& [key, v] : table.entries) {
    if (key.second != table.g) continue;
    Integer m = multinomial(total, key.first);
    report.entries.push_back({key.first, v, m, false});
    if (m != 0) ++votes[v / Rational(m)];
  }
  if (report.entries.empty()) throw InvalidInput("table has no k = g entries");
  int best = -1;
  for (const auto& e : report.entries) {
    if (e.multinomial == 0) continue;
    Rational ratio = e.value / Rational(e.multinomial);
    if (votes[ratio] > best) {
      best = votes[ratio];
      report.c_g = ratio;
    }
  }
  for (auto& e : report.entries) {
    e.match = e.value == Rational(e.multinomial) * report.c_g;
    report.all_match = report.all_match && e.match;
  }
  return report;
}

/// Right-hand side of the ELSV formula from a table of Hodge integrals:
/// r! prod(alpha_i^alpha_i / alpha_i!) sum_{a,k} (-1)^k <psi^a lambda_k> alpha^a.
inline Rational elsv_right_hand_side(const HodgeIntegralTable& table, const Partition& alpha) {
  if (alpha.length() != table.n) throw InvalidInput("alpha has the wrong number of parts");
  std::vector<Rational> x(alpha.parts().begin(), alpha.parts().end());
  Rational integral = 0;
  for (const auto& [key, v] : table.entries) {
    std::vector<int> lambda(key.first.rbegin(), key.first.rend());
    Rational sign = key.second % 2 ? -1 : 1;
    integral += sign * v * SymmetricPolynomial::monomial_symmetric(lambda, x);
  }
  return elsv_prefactor(table.g, alpha) * integral;
}

inline nlohmann::json hodge_entries_json(const std::map<std::pair<std::vector<int>, int>, Rational>& entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [key, v] : entries) out.push_back({{"a", key.first}, {"k", key.second}, {"v", to_string(v)}});
  return out;
}

inline nlohmann::json elsv_report_json(const HodgeIntegralTable& table, const std::optional<LambdaGReport>& lg) {
  const auto [lo, hi] = elsv_band(table.g, table.n);
  nlohmann::json j{{"g", table.g}, {"n", table.n}, {"band", {lo, hi}}, {"entries", hodge_entries_json(table.entries)}};
  if (lg) j["lambda_g"] = {{"c_g", to_string(lg->c_g)}, {"all_match", lg->all_match}};
  return j;
}

}  // namespace hodgekit
