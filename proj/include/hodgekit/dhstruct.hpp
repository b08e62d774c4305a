#pragma once

// Structure of one-part double Hurwitz numbers.
//
// P^g(beta) = H^g_{(d),beta} / (r! d) is fitted as a symmetric polynomial of
// degree <= 4g-3+n and expanded against brackets <psi^a Lambda_k> with
// k = 4g-3+n - |a| even and 0 <= k <= 2g.

#include <algorithm>
#include <optional>
#include <vector>

#include <json.hpp>

#include "hodgekit/elsv.hpp"
#include "hodgekit/hurwitz.hpp"
#include "hodgekit/symmetric_polynomial.hpp"

namespace hodgekit {

inline int dh_top_degree(int g, int n) { return 4 * g - 3 + n; }

inline void require_dh_case(int g, int n) {
  if (g < 0 || n < 1 || (g == 0 && n <= 2)) {
    throw InvalidInput("(g,n) = (" + std::to_string(g) + "," + std::to_string(n) + ") has no polynomial structure");
  }
}

inline Rational normalized_double_hurwitz(int g, const Partition& beta,
                                          HurwitzEngine& engine = default_hurwitz_engine()) {
  const int d = beta.weight();
  return double_hurwitz_one_part(g, d, beta, engine) /
         Rational(factorial(double_hurwitz_r(g, beta)) * Integer(d));
}

/// Every n-part partition of every d in [n, max_d].
inline std::vector<Partition> dh_grid(int n, int max_d) {
  std::vector<Partition> grid;
  for (int d = n; d <= max_d; ++d) {
    for (auto& p : partitions_of(d, n)) grid.push_back(std::move(p));
  }
  return grid;
}

struct DoubleHurwitzTable {
  int g = 0;
  int n = 0;
  SymmetricPolynomial polynomial;
  /// (a ascending, k) -> <psi^a Lambda_k>
  std::map<std::pair<std::vector<int>, int>, Rational> entries;

  std::optional<Rational> find(std::vector<int> a, int k) const {
    std::sort(a.begin(), a.end());
    auto it = entries.find({a, k});
    if (it == entries.end()) return std::nullopt;
    return it->second;
  }
};

/// Fit P^g over the grid and read off the brackets. All degrees 0..4g-3+n are
/// unknowns, so parity and the codegree band are measured, not imposed.
inline DoubleHurwitzTable dh_fit(int g, int n, const std::vector<Partition>& grid,
                                 HurwitzEngine& engine = default_hurwitz_engine()) {
  require_dh_case(g, n);
  const int top = dh_top_degree(g, n);
  std::vector<int> degrees;
  for (int deg = 0; deg <= top; ++deg) degrees.push_back(deg);
  std::vector<std::pair<std::vector<int>, Rational>> samples;
  for (const auto& beta : grid) {
    if (beta.length() != n) throw InvalidInput("grid partition " + beta.str() + " does not have " + std::to_string(n) + " parts");
    samples.emplace_back(beta.parts(), normalized_double_hurwitz(g, beta, engine));
  }
  SymmetricFit fit = fit_symmetric(n, degrees, samples);
  switch (fit.status) {
    case SymmetricFit::Status::Ok:
      break;
    case SymmetricFit::Status::Inconsistent:
      throw StructureViolation("no polynomial of degree <= " + std::to_string(top) + " fits: " + fit.detail);
    case SymmetricFit::Status::RankDeficient:
    case SymmetricFit::Status::TooFewSamples:
      throw DegenerateGrid(fit.detail);
  }
  for (int deg : fit.polynomial.degrees()) {
    const int k = top - deg;
    if (k % 2 != 0) throw StructureViolation("nonzero component in degree " + std::to_string(deg) + " of the wrong parity");
    if (k > 2 * g) throw StructureViolation("nonzero component in degree " + std::to_string(deg) + " below the band");
  }
  DoubleHurwitzTable table{g, n, fit.polynomial, {}};
  for (int k = 0; k <= std::min(2 * g, top); k += 2) {
    for (auto& e : exponent_partitions(top - k, n)) {
      Rational v = fit.polynomial.coefficient(e);
      if ((k / 2) % 2) v = -v;
      std::vector<int> a(e.rbegin(), e.rend());
      table.entries.emplace(std::make_pair(a, k), v);
    }
  }
  return table;
}

struct RelationCheck {
  /// "complete" when a companion table was supplied, "partial" otherwise.
  std::string status = "partial";
  int checked = 0;
  std::vector<std::pair<std::vector<int>, int>> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// <tau_0 prod tau_{b_i} Lambda_k>_{n+1} = sum_j <tau_{b_j - 1} prod_{i != j} tau_{b_i} Lambda_k>_n
inline RelationCheck dh_string_check(const DoubleHurwitzTable& lower, const DoubleHurwitzTable& upper) {
  if (lower.g != upper.g || upper.n != lower.n + 1) throw InvalidInput("string check needs tables for (g,n) and (g,n+1)");
  RelationCheck check;
  check.status = "complete";
  for (const auto& [key, v] : upper.entries) {
    const auto& a = key.first;
    if (a.empty() || a.front() != 0) continue;
    std::vector<int> b(a.begin() + 1, a.end());
    Rational expected = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == 0) continue;
      std::vector<int> c = b;
      --c[j];
      auto found = lower.find(c, key.second);
      if (found) expected += *found;
    }
    ++check.checked;
    if (expected != v) check.mismatches.push_back(key);
  }
  return check;
}

/// <tau_1 prod tau_{b_i}>_{n+1} = (2g-2+n) <prod tau_{b_i}>_n on the Lambda_0 brackets.
inline RelationCheck dh_dilaton_check(const DoubleHurwitzTable& lower, const DoubleHurwitzTable& upper) {
  if (lower.g != upper.g || upper.n != lower.n + 1) throw InvalidInput("dilaton check needs tables for (g,n) and (g,n+1)");
  RelationCheck check;
  check.status = "complete";
  const Rational factor(2 * lower.g - 2 + lower.n);
  for (const auto& [key, v] : upper.entries) {
    if (key.second != 0) continue;
    auto it = std::find(key.first.begin(), key.first.end(), 1);
    if (it == key.first.end()) continue;
    std::vector<int> b(key.first.begin(), it);
    b.insert(b.end(), it + 1, key.first.end());
    auto found = lower.find(b, 0);
    ++check.checked;
    if (!found || factor * *found != v) check.mismatches.push_back(key);
  }
  return check;
}

struct DhStructureReport {
  DoubleHurwitzTable table;
  bool parity_ok = true;
  RelationCheck string;
  RelationCheck dilaton;
};

/// Structure report for (g,n); the string and dilaton checks use the
/// (g,n+1) table when one is given and are marked partial otherwise.
inline DhStructureReport dh_structure(const DoubleHurwitzTable& table, const std::optional<DoubleHurwitzTable>& companion) {
  DhStructureReport report{table, true, {}, {}};
  const int top = dh_top_degree(table.g, table.n);
  for (int deg : table.polynomial.degrees()) {
    if ((top - deg) % 2 != 0) report.parity_ok = false;
  }
  if (companion) {
    report.string = dh_string_check(table, *companion);
    report.dilaton = dh_dilaton_check(table, *companion);
  }
  return report;
}

inline nlohmann::json relation_json(const RelationCheck& check) {
  nlohmann::json mismatches = nlohmann::json::array();
  for (const auto& [a, k] : check.mismatches) mismatches.push_back({{"a", a}, {"k", k}});
  return {{"status", check.status}, {"checked", check.checked}, {"ok", check.ok()}, {"mismatches", mismatches}};
}

inline nlohmann::json dh_report_json(const DhStructureReport& report) {
  const int top = dh_top_degree(report.table.g, report.table.n);
  return {{"g", report.table.g},
          {"n", report.table.n},
          {"band", {std::max(0, top - 2 * report.table.g), top}},
          {"entries", hodge_entries_json(report.table.entries)},
          {"parity_ok", report.parity_ok},
          {"conjecture_form", "GJV-3.5"},
          {"normalization", "r!*d"},
          {"sign_convention", "assumed: coefficient times (-1)^(k/2) for Lambda_k"},
          {"relations_form", "adopted"},
          {"string", relation_json(report.string)},
          {"dilaton", relation_json(report.dilaton)}};
}

}  // namespace hodgekit
