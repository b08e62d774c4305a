#pragma once

// Sparse exact truncated power series in hbar and t_0..t_K (or p_1..p_K).
//
// Every series carries, per total degree d in the t (or p) variables, two
// bounds on the hbar exponent:
//
//   floor[d]  no term of the represented series at degree d has h < floor[d]
//   cap[d]    every coefficient at degree d with h <= cap[d] is known exactly
//
// Only coefficients inside the certified region (h <= cap[d], d <= D) are
// stored. Operations propagate both bounds, so a product or derivative never
// reports a coefficient that depends on something outside the window.

#include <algorithm>
#include <compare>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hodgekit/budget.hpp"
#include "hodgekit/combinatorics.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/rational.hpp"
#include "hodgekit/virasoro.hpp"

namespace hodgekit {

enum class VariableFamily { T, P };

inline std::string family_name(VariableFamily f) { return f == VariableFamily::T ? "t" : "p"; }

struct TruncationSpec {
  int K = 0;      ///< largest variable index
  int D = 0;      ///< largest total degree in the variables
  int h_min = 0;  ///< lowest retained hbar exponent
  int h_max = 0;  ///< highest retained hbar exponent

  void validate(VariableFamily family) const {
    if (D < 0) throw InvalidInput("truncation degree D must be >= 0");
    if (K < 0 || (family == VariableFamily::P && K < 1)) {
      throw InvalidInput("truncation needs K >= 0 (K >= 1 for the p family)");
    }
    if (h_min > h_max) throw InvalidInput("truncation window needs Hmin <= Hmax");
  }

  bool operator==(const TruncationSpec&) const = default;
};

struct Monomial {
  int h = 0;
  std::vector<int> e;

  int degree() const {
    int d = 0;
    for (int x : e) d += x;
    return d;
  }
  auto operator<=>(const Monomial&) const = default;
};

/// Per-degree hbar bounds; see the header comment.
struct ExactnessProfile {
  static constexpr long long kInf = 1LL << 40;

  std::vector<long long> floor;
  std::vector<long long> cap;

  static ExactnessProfile window(int D, long long lo, long long hi) {
    return {std::vector<long long>(static_cast<std::size_t>(D) + 1, lo),
            std::vector<long long>(static_cast<std::size_t>(D) + 1, hi)};
  }
  int degree_bound() const { return static_cast<int>(floor.size()) - 1; }
  bool certified(int h, int d) const {
    return d >= 0 && d <= degree_bound() && h <= cap[static_cast<std::size_t>(d)];
  }
};

namespace detail {
inline long long sat(long long v) {
  return std::clamp(v, -ExactnessProfile::kInf, ExactnessProfile::kInf);
}
inline bool is_inf(long long v) { return v >= ExactnessProfile::kInf; }
}  // namespace detail

class TruncatedSeries {
 public:
  using Terms = std::map<Monomial, Rational>;

  /// Zero series whose coefficients are exact on the whole window.
  TruncatedSeries(VariableFamily family, TruncationSpec spec)
      : family_(family), spec_(spec),
        profile_(ExactnessProfile::window(spec.D, spec.h_min, spec.h_max)) {
    spec_.validate(family_);
    normalize();
  }

  /// Exact polynomial in the listed variables: it is known not to depend on
  /// any other variable and every coefficient up to degree D is certified.
  static TruncatedSeries polynomial(VariableFamily family, int K, int D) {
    TruncatedSeries s(family, TruncationSpec{K, D, 0, 0});
    s.profile_ = ExactnessProfile::window(D, ExactnessProfile::kInf, ExactnessProfile::kInf);
    s.closed_ = true;
    return s;
  }

  VariableFamily family() const noexcept { return family_; }
  const TruncationSpec& spec() const noexcept { return spec_; }
  const ExactnessProfile& profile() const noexcept { return profile_; }
  const Terms& terms() const noexcept { return terms_; }
  bool closed() const noexcept { return closed_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  int num_vars() const noexcept { return family_ == VariableFamily::T ? spec_.K + 1 : spec_.K; }

  /// Position of a variable (t_k -> k, p_b -> b - 1) in exponent vectors.
  int position(int var) const {
    int pos = family_ == VariableFamily::T ? var : var - 1;
    if (pos < 0 || pos >= num_vars()) {
      throw InvalidInput("variable " + family_name(family_) + std::to_string(var) +
                         " outside the series variables");
    }
    return pos;
  }

  bool certified(int h, int degree) const { return profile_.certified(h, degree); }

  /// Coefficient of hbar^h * prod x^e; the slot must be certified.
  Rational coefficient(int h, const std::vector<int>& e) const {
    check_exponents(e);
    Monomial m{h, e};
    if (!certified(h, m.degree())) {
      throw ExactnessViolation("coefficient outside the certified window");
    }
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void set(int h, std::vector<int> e, const Rational& value) {
    check_exponents(e);
    Monomial m{h, std::move(e)};
    const int d = m.degree();
    if (d > spec_.D) throw InvalidInput("monomial degree exceeds D");
    if (!closed_ && (h < spec_.h_min || h > spec_.h_max)) {
      throw InvalidInput("hbar exponent outside the retained window");
    }
    if (!certified(h, d)) throw ExactnessViolation("coefficient outside the certified window");
    if (value == 0) {
      terms_.erase(m);
    } else {
      terms_[m] = value;
      auto& fl = profile_.floor[static_cast<std::size_t>(d)];
      fl = std::min<long long>(fl, h);
    }
  }

  /// Convenience: add a value to a coefficient.
  void accumulate(int h, std::vector<int> e, const Rational& value) {
    Monomial m{h, e};
    auto it = terms_.find(m);
    Rational v = value + (it == terms_.end() ? Rational(0) : it->second);
    set(h, std::move(e), v);
  }

  /// Number of (h, monomial) slots with h_lo <= h <= cap[d] (finite caps are
  /// clipped to the retained window). Used to report how much a check covered.
  Integer certified_slots(int h_lo) const {
    Integer total = 0;
    for (int d = 0; d <= profile_.degree_bound(); ++d) {
      long long hi = std::min<long long>(profile_.cap[static_cast<std::size_t>(d)], spec_.h_max);
      if (hi < h_lo) continue;
      total += binomial(num_vars() + d - 1, d) * Integer(static_cast<long>(hi - h_lo + 1));
    }
    return total;
  }

  // --- arithmetic -----------------------------------------------------------

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    return combine(a, b, Rational(1));
  }
  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    return combine(a, b, Rational(-1));
  }

  TruncatedSeries scaled(const Rational& c) const {
    TruncatedSeries out = *this;
    if (c == 0) {
      out.terms_.clear();
      out.profile_ = ExactnessProfile::window(spec_.D, ExactnessProfile::kInf, ExactnessProfile::kInf);
    } else {
      for (auto& [m, v] : out.terms_) v *= c;
    }
    out.normalize();
    return out;
  }

  /// Multiply by hbar^j.
  TruncatedSeries hbar_shifted(int j) const {
    TruncatedSeries out(family_, spec_);
    out.closed_ = closed_;
    out.spec_.h_min += j;
    out.spec_.h_max += j;
    out.profile_ = profile_;
    for (std::size_t d = 0; d < profile_.floor.size(); ++d) {
      if (!detail::is_inf(out.profile_.floor[d])) out.profile_.floor[d] += j;
      if (!detail::is_inf(out.profile_.cap[d])) out.profile_.cap[d] += j;
    }
    for (const auto& [m, v] : terms_) out.terms_.emplace(Monomial{m.h + j, m.e}, v);
    out.normalize();
    return out;
  }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    check_compatible(a, b);
    const int D = std::min(a.spec_.D, b.spec_.D);
    TruncatedSeries out(a.family_, TruncationSpec{a.spec_.K, D, std::min(a.spec_.h_min + b.spec_.h_min, 0),
                                                  std::max(a.spec_.h_max + b.spec_.h_max, 0)});
    out.closed_ = a.closed_ && b.closed_;
    const auto& pa = a.profile_;
    const auto& pb = b.profile_;
    for (int d = 0; d <= D; ++d) {
      long long fl = ExactnessProfile::kInf;
      long long cp = ExactnessProfile::kInf;
      for (int d1 = 0; d1 <= d; ++d1) {
        const auto i1 = static_cast<std::size_t>(d1);
        const auto i2 = static_cast<std::size_t>(d - d1);
        const long long fa = pa.floor[i1], fb = pb.floor[i2];
        if (detail::is_inf(fa) || detail::is_inf(fb)) continue;
        fl = std::min(fl, detail::sat(fa + fb));
        cp = std::min(cp, detail::sat(pa.cap[i1] + fb));
        cp = std::min(cp, detail::sat(fa + pb.cap[i2]));
      }
      out.profile_.floor[static_cast<std::size_t>(d)] = fl;
      out.profile_.cap[static_cast<std::size_t>(d)] = cp;
    }
    std::map<Monomial, Rational> acc;
    std::vector<int> e(static_cast<std::size_t>(a.num_vars()));
    for (const auto& [ma, va] : a.terms_) {
      budget::checkpoint();
      const int da = ma.degree();
      for (const auto& [mb, vb] : b.terms_) {
        const int d = da + mb.degree();
        if (d > D) continue;
        const int h = ma.h + mb.h;
        if (h > out.profile_.cap[static_cast<std::size_t>(d)]) continue;
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ma.e[i] + mb.e[i];
        acc[Monomial{h, e}] += va * vb;
      }
    }
    for (auto& [m, v] : acc) {
      if (v != 0) out.terms_.emplace(m, std::move(v));
    }
    out.refresh_window();
    out.normalize();
    return out;
  }

  /// d/d(var)
  TruncatedSeries differentiated(int var) const {
    const int pos = position(var);
    if (spec_.D == 0) return derivative_of_constant();
    TruncatedSeries out(family_, TruncationSpec{spec_.K, spec_.D - 1, spec_.h_min, spec_.h_max});
    out.closed_ = closed_;
    for (int d = 0; d < spec_.D; ++d) {
      out.profile_.floor[static_cast<std::size_t>(d)] = profile_.floor[static_cast<std::size_t>(d) + 1];
      out.profile_.cap[static_cast<std::size_t>(d)] = profile_.cap[static_cast<std::size_t>(d) + 1];
    }
    for (const auto& [m, v] : terms_) {
      const int k = m.e[static_cast<std::size_t>(pos)];
      if (k == 0) continue;
      Monomial dm = m;
      dm.e[static_cast<std::size_t>(pos)] -= 1;
      if (dm.degree() > out.spec_.D) continue;
      out.terms_.emplace(std::move(dm), v * k);
    }
    out.normalize();
    return out;
  }

  /// Repeated differentiation, e.g. {n, 0, 0} for d^3/dt_n dt_0^2.
  TruncatedSeries differentiated(std::initializer_list<int> vars) const {
    TruncatedSeries out = *this;
    for (int v : vars) out = out.differentiated(v);
    return out;
  }

  /// Multiply by a variable.
  TruncatedSeries times_variable(int var) const {
    const int pos = position(var);
    TruncatedSeries out = *this;
    out.terms_.clear();
    for (int d = spec_.D; d >= 1; --d) {
      out.profile_.floor[static_cast<std::size_t>(d)] = profile_.floor[static_cast<std::size_t>(d) - 1];
      out.profile_.cap[static_cast<std::size_t>(d)] = profile_.cap[static_cast<std::size_t>(d) - 1];
    }
    out.profile_.floor[0] = ExactnessProfile::kInf;
    out.profile_.cap[0] = ExactnessProfile::kInf;
    for (const auto& [m, v] : terms_) {
      if (m.degree() + 1 > spec_.D) {
        if (closed_) throw ExactnessViolation("closed polynomial exceeds its degree bound D");
        continue;
      }
      Monomial mm = m;
      mm.e[static_cast<std::size_t>(pos)] += 1;
      out.terms_.emplace(std::move(mm), v);
    }
    if (!closed_) {
      // degree D of the result came from degree D-1 of the input, already shifted
    }
    out.normalize();
    return out;
  }

  /// Set every variable with index > K' to zero.
  TruncatedSeries restricted(int new_K) const {
    if (new_K > spec_.K) throw InvalidInput("restriction cannot add variables");
    TruncationSpec s = spec_;
    s.K = new_K;
    TruncatedSeries out(family_, s);
    out.closed_ = closed_;
    out.profile_ = profile_;
    const int keep = out.num_vars();
    for (const auto& [m, v] : terms_) {
      bool vanishes = false;
      for (std::size_t i = static_cast<std::size_t>(keep); i < m.e.size(); ++i) {
        if (m.e[i] != 0) vanishes = true;
      }
      if (vanishes) continue;
      out.terms_.emplace(Monomial{m.h, std::vector<int>(m.e.begin(), m.e.begin() + keep)}, v);
    }
    out.normalize();
    return out;
  }

  /// Truncate the degree bound to D' <= D.
  TruncatedSeries degree_truncated(int new_D) const {
    if (new_D > spec_.D || new_D < 0) throw InvalidInput("degree truncation out of range");
    TruncatedSeries out = *this;
    out.spec_.D = new_D;
    out.profile_.floor.resize(static_cast<std::size_t>(new_D) + 1);
    out.profile_.cap.resize(static_cast<std::size_t>(new_D) + 1);
    for (auto it = out.terms_.begin(); it != out.terms_.end();) {
      it = it->first.degree() > new_D ? out.terms_.erase(it) : std::next(it);
    }
    out.closed_ = false;
    return out;
  }

  bool operator==(const TruncatedSeries& other) const {
    return family_ == other.family_ && spec_.K == other.spec_.K && terms_ == other.terms_;
  }

 private:
  friend TruncatedSeries exp_truncated(const TruncatedSeries&, bool, std::optional<TruncationSpec>);

  void check_exponents(const std::vector<int>& e) const {
    if (static_cast<int>(e.size()) != num_vars()) throw InvalidInput("exponent vector has wrong length");
    for (int x : e) {
      if (x < 0) throw InvalidInput("negative exponent");
    }
  }

  static void check_compatible(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.family_ != b.family_) throw InvalidInput("mixed variable families");
    if (a.spec_.K != b.spec_.K) throw InvalidInput("series have different variable sets");
  }

  static TruncatedSeries combine(const TruncatedSeries& a, const TruncatedSeries& b, const Rational& sign) {
    check_compatible(a, b);
    const int D = std::min(a.spec_.D, b.spec_.D);
    TruncatedSeries out(a.family_, TruncationSpec{a.spec_.K, D, std::min(a.spec_.h_min, b.spec_.h_min),
                                                  std::max(a.spec_.h_max, b.spec_.h_max)});
    out.closed_ = a.closed_ && b.closed_;
    for (int d = 0; d <= D; ++d) {
      const auto i = static_cast<std::size_t>(d);
      out.profile_.floor[i] = std::min(a.profile_.floor[i], b.profile_.floor[i]);
      out.profile_.cap[i] = std::min(a.profile_.cap[i], b.profile_.cap[i]);
    }
    std::map<Monomial, Rational> acc;
    for (const auto& [m, v] : a.terms_) acc[m] += v;
    for (const auto& [m, v] : b.terms_) acc[m] += sign * v;
    for (auto& [m, v] : acc) {
      const int d = m.degree();
      if (v != 0 && d <= D && m.h <= out.profile_.cap[static_cast<std::size_t>(d)]) {
        out.terms_.emplace(m, std::move(v));
      }
    }
    out.normalize();
    return out;
  }

  TruncatedSeries derivative_of_constant() const {
    // degree bound 0: the derivative has no certified coefficient at all
    TruncatedSeries out(family_, spec_);
    out.closed_ = closed_;
    out.terms_.clear();
    out.profile_.floor[0] = profile_.floor[0];
    out.profile_.cap[0] = closed_ ? ExactnessProfile::kInf : -ExactnessProfile::kInf;
    out.normalize();
    return out;
  }

  void refresh_window() {
    for (const auto& [m, v] : terms_) {
      spec_.h_min = std::min(spec_.h_min, m.h);
      spec_.h_max = std::max(spec_.h_max, m.h);
    }
  }

  /// Tighten floors from the certified zeros and keep cap >= floor - 1, so the
  /// certified region always includes the known-empty part below the floor.
  void normalize() {
    std::vector<long long> lowest(profile_.floor.size(), ExactnessProfile::kInf);
    for (const auto& [m, v] : terms_) {
      auto& l = lowest[static_cast<std::size_t>(m.degree())];
      l = std::min<long long>(l, m.h);
    }
    for (std::size_t d = 0; d < profile_.floor.size(); ++d) {
      long long& fl = profile_.floor[d];
      long long& cp = profile_.cap[d];
      const long long known_empty_up_to = detail::is_inf(cp) ? ExactnessProfile::kInf : cp + 1;
      fl = std::max(fl, std::min(lowest[d], known_empty_up_to));
      if (detail::is_inf(fl)) {
        cp = ExactnessProfile::kInf;
      } else {
        cp = std::max(cp, fl - 1);
      }
    }
  }

  VariableFamily family_;
  TruncationSpec spec_;
  ExactnessProfile profile_;
  Terms terms_;
  bool closed_ = false;
};

/// e^F on the certified window of F.
///
/// F must have no degree-0 part unless allow_constant is set, in which case
/// degree-0 terms are permitted at positive hbar exponents (the exponential
/// then terminates on every finite cap). If out is given, its hbar window
/// must contain every exponent the result can carry, otherwise the call
/// fails rather than drop contributions.
inline TruncatedSeries exp_truncated(const TruncatedSeries& F, bool allow_constant = false,
                                     std::optional<TruncationSpec> out = std::nullopt) {
  TruncatedSeries G = F;
  long long const_floor = ExactnessProfile::kInf;
  for (const auto& [m, v] : F.terms()) {
    if (m.degree() != 0) continue;
    if (!allow_constant) throw InvalidInput("exp_truncated: F has a constant term");
    if (m.h <= 0) throw InvalidInput("exp_truncated: constant term at hbar^h with h <= 0 is not exact");
    const_floor = std::min<long long>(const_floor, m.h);
  }
  // the precondition asserts there are no other constant terms
  G.profile_.floor[0] = const_floor;
  if (detail::is_inf(const_floor)) G.profile_.cap[0] = ExactnessProfile::kInf;
  G.normalize();

  const int D = F.spec().D;
  long long iterations = D;
  if (!detail::is_inf(const_floor)) {
    long long max_cap = std::numeric_limits<long long>::min();
    long long min_floor = 0;
    for (int d = 0; d <= D; ++d) {
      const long long c = G.profile_.cap[static_cast<std::size_t>(d)];
      if (detail::is_inf(c)) throw ExactnessViolation("exp with a constant term needs finite caps");
      max_cap = std::max(max_cap, c);
      if (d >= 1) min_floor = std::min(min_floor, std::min(G.profile_.floor[static_cast<std::size_t>(d)], 0LL));
    }
    // P_k at degree <= D has h >= D*min_floor + (k - D)*const_floor
    iterations = D + std::max(0LL, (max_cap - D * min_floor) / const_floor + 1);
  }

  TruncatedSeries one(F.family(), TruncationSpec{F.spec().K, D, 0, 0});
  one.profile_ = ExactnessProfile::window(D, ExactnessProfile::kInf, ExactnessProfile::kInf);
  one.profile_.floor[0] = 0;
  one.closed_ = F.closed();
  one.terms_.emplace(Monomial{0, std::vector<int>(static_cast<std::size_t>(F.num_vars()), 0)}, Rational(1));
  one.normalize();

  TruncatedSeries sum = one;
  TruncatedSeries power = one;
  for (long long k = 1; k <= iterations; ++k) {
    budget::checkpoint();
    power = (power * G).scaled(Rational(1, static_cast<long>(k)));
    sum = sum + power;
  }
  sum.closed_ = F.closed();

  if (out) {
    out->validate(F.family());
    long long lowest = ExactnessProfile::kInf;
    for (int d = 0; d <= std::min(D, out->D); ++d) lowest = std::min(lowest, sum.profile_.floor[static_cast<std::size_t>(d)]);
    if (!detail::is_inf(lowest) && lowest < out->h_min) {
      throw ExactnessViolation("hbar window too narrow for the powers contributing to exp(F)");
    }
    if (out->K != F.spec().K) throw InvalidInput("exp_truncated: output spec changes the variables");
    TruncatedSeries r = sum.degree_truncated(out->D);
    for (auto& c : r.profile_.cap) c = std::min<long long>(c, out->h_max);
    for (auto it = r.terms_.begin(); it != r.terms_.end();) {
      it = it->first.h > out->h_max ? r.terms_.erase(it) : std::next(it);
    }
    r.spec_.h_min = out->h_min;
    r.spec_.h_max = out->h_max;
    r.normalize();
    return r;
  }
  sum.spec_.h_min = static_cast<int>(std::min<long long>(sum.spec_.h_min, F.spec().h_min));
  return sum;
}

// --- residual checkers -------------------------------------------------------

namespace detail {
inline void require_nonempty(const TruncatedSeries& r, int h_lo, const char* what) {
  if (r.certified_slots(h_lo) == 0) {
    throw ExactnessViolation(std::string(what) + ": window too narrow to certify any coefficient");
  }
}
}  // namespace detail

/// LHS - hbar^2 * RHS of the KdV equation
///   (2n+1) F_{n,0,0} = F_{n-1,0} F_{0,0,0} + 2 F_{n-1,0,0} F_{0,0} + 1/4 F_{n-1,0,0,0,0}.
/// With F = sum hbar^{2g-2} F_g the right-hand side carries hbar^2 relative
/// to the left; this is the only grading under which the equation is
/// homogeneous.
inline TruncatedSeries kdv_residual(const TruncatedSeries& F, int n) {
  if (F.family() != VariableFamily::T) throw InvalidInput("kdv_residual needs a t-family series");
  if (n < 1) throw InvalidInput("kdv_residual needs n >= 1");
  if (n > F.spec().K) throw InvalidInput("kdv_residual needs t_n among the variables");
  if (F.spec().D < 5) throw ExactnessViolation("kdv_residual needs D >= 5 for the fifth derivative");
  const TruncatedSeries F0 = F.differentiated(0);
  const TruncatedSeries F00 = F0.differentiated(0);
  const TruncatedSeries F000 = F00.differentiated(0);
  const TruncatedSeries Fm = F.differentiated(n - 1);
  const TruncatedSeries Fm0 = Fm.differentiated(0);
  const TruncatedSeries Fm00 = Fm0.differentiated(0);
  const TruncatedSeries Fm0000 = Fm00.differentiated({0, 0});
  TruncatedSeries lhs = F.differentiated({n, 0, 0}).scaled(Rational(2 * n + 1));
  TruncatedSeries rhs = Fm0 * F000 + (Fm00 * F00).scaled(2) + Fm0000.scaled(Rational(1, 4));
  TruncatedSeries r = lhs - rhs.hbar_shifted(2);
  detail::require_nonempty(r, F.spec().h_min, "kdv_residual");
  return r;
}

/// Residuals LHS - RHS of the first three KP equations (subscripts are
/// derivatives in p_1, p_2, ...).
inline std::vector<TruncatedSeries> kp_residuals(const TruncatedSeries& F) {
  if (F.family() != VariableFamily::P) throw InvalidInput("kp_residuals needs a p-family series");
  if (F.spec().K < 5) throw InvalidInput("kp_residuals needs p_1..p_5 (K >= 5)");
  if (F.spec().D < 6) throw ExactnessViolation("kp_residuals needs D >= 6 for the sixth derivative");
  auto d = [&](std::initializer_list<int> vars) { return F.differentiated(vars); };
  const TruncatedSeries F11 = d({1, 1});
  const TruncatedSeries F21 = d({2, 1});
  const TruncatedSeries F31 = d({3, 1});
  const TruncatedSeries F111 = d({1, 1, 1});
  const TruncatedSeries F1111 = d({1, 1, 1, 1});

  TruncatedSeries eq1 = d({2, 2}) - ((F11 * F11).scaled(Rational(-1, 2)) + F31 + F1111.scaled(Rational(-1, 12)));
  TruncatedSeries eq2 = d({3, 2}) - ((F11 * F21).scaled(-1) + d({4, 1}) + d({2, 1, 1, 1}).scaled(Rational(-1, 6)));
  TruncatedSeries rhs3 = (F21 * F21).scaled(Rational(-1, 2)) + (F11 * F31).scaled(-1) + d({5, 1}) +
                         (F111 * F111).scaled(Rational(1, 8)) + (F11 * F1111).scaled(Rational(1, 12)) +
                         d({3, 1, 1, 1}).scaled(Rational(-1, 4)) + d({1, 1, 1, 1, 1, 1}).scaled(Rational(1, 120));
  TruncatedSeries eq3 = d({4, 2}) - rhs3;
  std::vector<TruncatedSeries> out{eq1, eq2, eq3};
  for (const auto& r : out) detail::require_nonempty(r, F.spec().h_min, "kp_residuals");
  return out;
}

/// L_n applied to tau.
///
/// For a truncated series (not closed) the derivatives d/dt_j with j > K are
/// unknown, so the result is restricted to t_0..t_{K - max(n,0)} where every
/// term of L_n is computable. For a closed polynomial the operator is applied
/// exactly; an L_{-1} step that would create t_{K+1} is rejected.
inline TruncatedSeries virasoro_apply(int n, const TruncatedSeries& tau,
                                      QuadraticRange range = QuadraticRange::FromZero) {
  if (tau.family() != VariableFamily::T) throw InvalidInput("virasoro_apply needs a t-family series");
  const VirasoroOperator op = virasoro_operator(n, range);
  const int K = tau.spec().K;
  if (n + 1 > K) throw ExactnessViolation("virasoro_apply needs t_{n+1} among the variables");

  TruncatedSeries src = tau;
  int result_K = K;
  if (!tau.closed()) {
    result_K = K - std::max(n, 0);
  } else if (n == -1) {
    for (const auto& [m, v] : tau.terms()) {
      if (m.e[static_cast<std::size_t>(K)] != 0) {
        throw ExactnessViolation("L_{-1} would create t_{K+1}; enlarge K");
      }
    }
  }

  TruncatedSeries acc = tau.differentiated(n + 1).scaled(op.shift);
  for (int k = op.min_k; k <= K; ++k) {
    const int j = n + k;
    if (j > K) break;
    if (j < 0) continue;
    if (!tau.closed() && k > result_K) break;
    if (tau.closed() && n == -1 && k > K) break;
    acc = acc + tau.differentiated(j).times_variable(k).scaled(op.linear(k));
  }
  for (const auto& q : op.quadratic) {
    acc = acc + tau.differentiated({q.a, q.b}).hbar_shifted(2).scaled(q.coefficient);
  }
  if (op.constant != 0) acc = acc + tau.scaled(op.constant);
  if (op.potential != 0) {
    acc = acc + tau.times_variable(0).times_variable(0).hbar_shifted(-2).scaled(op.potential);
  }
  TruncatedSeries r = acc.restricted(result_K);
  if (!tau.closed()) detail::require_nonempty(r, tau.spec().h_min - 2, "virasoro_apply");
  return r;
}

// --- serialisation -------------------------------------------------------------

inline nlohmann::json spec_to_json(const TruncationSpec& s) {
  return {{"K", s.K}, {"D", s.D}, {"Hmin", s.h_min}, {"Hmax", s.h_max}};
}

inline nlohmann::json to_json(const TruncatedSeries& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, v] : s.terms()) {
    terms.push_back({{"h", m.h}, {"e", m.e}, {"v", to_string(v)}});
  }
  return {{"family", family_name(s.family())}, {"spec", spec_to_json(s.spec())}, {"terms", terms}};
}

/// Parse the canonical series document. The result is exact on its window.
inline TruncatedSeries series_from_json(const nlohmann::json& j) {
  try {
    const std::string fam = j.at("family").get<std::string>();
    if (fam != "t" && fam != "p") throw InvalidInput("family must be \"t\" or \"p\"");
    const VariableFamily family = fam == "t" ? VariableFamily::T : VariableFamily::P;
    const auto& js = j.at("spec");
    TruncationSpec spec{js.at("K").get<int>(), js.at("D").get<int>(), js.at("Hmin").get<int>(),
                        js.at("Hmax").get<int>()};
    TruncatedSeries s(family, spec);
    for (const auto& t : j.at("terms")) {
      s.set(t.at("h").get<int>(), t.at("e").get<std::vector<int>>(),
            parse_canonical_rational(t.at("v").get<std::string>()));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed series document: ") + e.what());
  }
}

}  // namespace hodgekit
