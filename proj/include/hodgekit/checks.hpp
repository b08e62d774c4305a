#pragma once

// Identity checks over truncated series, shared by the CLI and the acceptance run.

#include <vector>

#include <json.hpp>

#include "hodgekit/series.hpp"
#include "hodgekit/witten.hpp"

namespace hodgekit {

inline std::string range_name(QuadraticRange r) { return r == QuadraticRange::FromZero ? "from_zero" : "from_one"; }

struct ResidualSummary {
  std::string label;
  Integer certified_slots;
  std::size_t nonzero_terms = 0;
  bool ok() const { return nonzero_terms == 0; }
};

inline ResidualSummary summarize(std::string label, const TruncatedSeries& r, int h_lo) {
  return {std::move(label), r.certified_slots(h_lo), r.terms().size()};
}

inline nlohmann::json summary_json(const ResidualSummary& s) {
  return {{"label", s.label}, {"certified_slots", to_string(s.certified_slots)}, {"nonzero_terms", s.nonzero_terms}, {"ok", s.ok()}};
}

/// KdV residuals of the truncated free energy for genus <= gmax.
inline std::vector<ResidualSummary> kdv_check(int K, int D, int gmax, const std::vector<int>& ns,
                                              IntersectionNumbers& numbers) {
  if (gmax < 0) throw InvalidInput("gmax must be >= 0");
  const TruncatedSeries F = f_truncated(TruncationSpec{K, D, -2, 2 * gmax - 2}, numbers);
  std::vector<ResidualSummary> out;
  for (int n : ns) out.push_back(summarize("n=" + std::to_string(n), kdv_residual(F, n), -2));
  return out;
}

/// Monomials of degree <= max_degree in t_0..t_{max_index}, as index multisets.
inline std::vector<std::vector<int>> commutator_basis(int max_degree, int max_index) {
  std::vector<std::vector<int>> basis{{}};
  for (int deg = 1; deg <= max_degree; ++deg) {
    for (int s = 0; s <= max_index * deg; ++s) {
      for (auto& idx : index_multisets(deg, s, max_index)) basis.push_back(idx);
    }
  }
  return basis;
}

/// [L_m, L_n] = (m - n) L_{m+n} on every basis monomial, applied exactly.
inline bool commutator_holds(int m, int n, QuadraticRange range, int max_degree = 4, int max_index = 3) {
  const int K = max_index + 2 * std::max({m, n, 1}) + 6;
  const int D = max_degree + 8;
  for (const auto& idx : commutator_basis(max_degree, max_index)) {
    budget::checkpoint();
    auto mono = TruncatedSeries::polynomial(VariableFamily::T, K, D);
    mono.set(0, exponents_of(idx, K), 1);
    auto lhs = virasoro_apply(m, virasoro_apply(n, mono, range), range) -
               virasoro_apply(n, virasoro_apply(m, mono, range), range);
    auto rhs = virasoro_apply(m + n, mono, range).scaled(m - n);
    if (!(lhs - rhs).is_zero()) return false;
  }
  return true;
}

struct VirasoroRangeReport {
  QuadraticRange range;
  std::vector<ResidualSummary> annihilation;
  std::vector<std::pair<int, int>> commutator_failures;
  bool passes() const {
    for (const auto& s : annihilation) {
      if (!s.ok()) return false;
    }
    return commutator_failures.empty();
  }
};

/// L_n tau = 0 for n in [-1, nmax] and the commutator identity for m, n in
/// [-1, nmax], with tau built from the recursion under the same range.
inline VirasoroRangeReport virasoro_check(int nmax, int K, int D, int gmax, QuadraticRange range) {
  if (nmax < -1) throw InvalidInput("nmax must be >= -1");
  if (nmax + 1 > K) throw InvalidInput("K must be at least nmax + 1");
  IntersectionNumbers numbers(range);
  const TruncatedSeries tau = exp_truncated(f_truncated(TruncationSpec{K, D, -2, 2 * gmax - 2}, numbers));
  VirasoroRangeReport report{range, {}, {}};
  for (int n = -1; n <= nmax; ++n) {
    report.annihilation.push_back(summarize("n=" + std::to_string(n), virasoro_apply(n, tau, range), -4));
  }
  for (int m = -1; m <= nmax; ++m) {
    for (int n = m + 1; n <= nmax; ++n) {
      if (!commutator_holds(m, n, range)) report.commutator_failures.emplace_back(m, n);
    }
  }
  return report;
}

inline nlohmann::json virasoro_report_json(const VirasoroRangeReport& r) {
  nlohmann::json ann = nlohmann::json::array();
  for (const auto& s : r.annihilation) ann.push_back(summary_json(s));
  nlohmann::json fails = nlohmann::json::array();
  for (const auto& [m, n] : r.commutator_failures) fails.push_back({m, n});
  return {{"range", range_name(r.range)}, {"annihilation", ann}, {"commutator_failures", fails}, {"passes", r.passes()}};
}

inline std::vector<ResidualSummary> kp_check(const TruncatedSeries& F) {
  std::vector<ResidualSummary> out;
  auto residuals = kp_residuals(F);
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    out.push_back(summarize("equation " + std::to_string(i + 1), residuals[i], F.spec().h_min));
  }
  return out;
}

/// log(1 + p_1) = sum_{j>=1} (-1)^{j+1} p_1^j / j up to degree D.
inline TruncatedSeries log_one_plus_p1(int K, int D) {
  TruncatedSeries F(VariableFamily::P, TruncationSpec{K, D, 0, 0});
  for (int j = 1; j <= D; ++j) {
    std::vector<int> e(static_cast<std::size_t>(K), 0);
    e[0] = j;
    F.set(0, e, make_rational(j % 2 ? 1 : -1, j));
  }
  return F;
}

}  // namespace hodgekit
