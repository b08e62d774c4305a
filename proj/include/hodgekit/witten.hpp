#pragma once

// Intersection numbers <tau_{d_1} ... tau_{d_n}>_g of psi classes on the
// moduli space of stable curves.
//
// Extracting the coefficient of hbar^{2g-2} t_S from e^{-F} L_n e^F = 0 gives,
// for n >= 0 and with the coefficients of VirasoroOperator,
//
//   -shift <tau_{n+1} S>_g = sum_j linear(d_j) <tau_{n+d_j} S\j>_g
//        + sum_{(a,b)} c_ab ( <tau_a tau_b S>_{g-1}
//                             + sum_{g1+g2=g, I+J=S} <tau_a I>_{g1} <tau_b J>_{g2} )
//        + constant [g = 1, S empty],
//
// and for n = -1 the string equation with the t_0^2 / 2 potential as source.
// Removing the largest index m >= 1 with n = m - 1 (or a tau_0 when all
// indices vanish) strictly lowers 2g - 2 + #points, so the recursion closes.

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hodgekit/budget.hpp"
#include "hodgekit/combinatorics.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/linear_system.hpp"
#include "hodgekit/rational.hpp"
#include "hodgekit/series.hpp"
#include "hodgekit/virasoro.hpp"

namespace hodgekit {

/// Genus and sorted tau-indices.
struct CorrelatorKey {
  int g = 0;
  std::vector<int> d;

  CorrelatorKey() = default;
  CorrelatorKey(int genus, std::vector<int> indices) : g(genus), d(std::move(indices)) {
    std::sort(d.begin(), d.end());
  }

  int points() const noexcept { return static_cast<int>(d.size()); }
  int level() const noexcept { return 2 * g - 2 + points(); }
  int dimension() const noexcept { return 3 * g - 3 + points(); }
  int degree() const noexcept {
    int s = 0;
    for (int x : d) s += x;
    return s;
  }
  bool stable() const noexcept { return g >= 0 && level() > 0; }
  bool dimension_matches() const noexcept { return degree() == dimension(); }

  /// Throws unless the key is a valid argument of correlator().
  void validate() const {
    if (g < 0) throw InvalidInput("negative genus");
    if (d.empty()) throw InvalidInput("a correlator needs at least one marked point");
    for (int x : d) {
      if (x < 0) throw InvalidInput("negative tau index");
    }
    if (!stable()) {
      throw InvalidInput("unstable (g,n) = (" + std::to_string(g) + "," + std::to_string(points()) + ")");
    }
  }

  std::string str() const {
    std::string s = "<";
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? " t" : "t") + std::to_string(d[i]);
    return s + ">_" + std::to_string(g);
  }

  auto operator<=>(const CorrelatorKey&) const = default;
};

/// Memo of correlator values with the computing route recorded per entry.
class CorrelatorStore {
 public:
  struct Entry {
    Rational value;
    std::string provenance;
  };

  CorrelatorStore() = default;
  CorrelatorStore(const CorrelatorStore& other) {
    std::lock_guard lock(other.mutex_);
    entries_ = other.entries_;
  }

  /// Re-inserting a key must carry an equal value.
  void insert(const CorrelatorKey& key, const Rational& value, const std::string& provenance) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = entries_.try_emplace(key, Entry{value, provenance});
    if (!inserted && it->second.value != value) {
      throw IntegrityError("conflicting values for " + key.str() + ": " + to_string(it->second.value) +
                           " vs " + to_string(value));
    }
  }

  std::optional<Entry> find(const CorrelatorKey& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

  std::map<CorrelatorKey, Entry> snapshot() const {
    std::lock_guard lock(mutex_);
    return entries_;
  }

  static nlohmann::json record(const CorrelatorKey& key, const Rational& value) {
    return {{"g", key.g}, {"d", key.d}, {"v", to_string(value)}};
  }

  /// One canonical JSON object per line, keys in sorted order.
  void save(std::ostream& out) const {
    for (const auto& [key, entry] : snapshot()) out << record(key, entry.value).dump() << '\n';
  }

  /// Loads records; lines must be canonical. Values are checked against
  /// anything already present.
  void load(std::istream& in, const std::string& provenance = "loaded") {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        CorrelatorKey key(j.at("g").get<int>(), j.at("d").get<std::vector<int>>());
        key.validate();
        insert(key, parse_canonical_rational(j.at("v").get<std::string>()), provenance);
      } catch (const nlohmann::json::exception& e) {
        throw CacheIntegrity(number, e.what());
      } catch (const InvalidInput& e) {
        throw CacheIntegrity(number, e.what());
      }
    }
  }

 private:
  mutable std::mutex mutex_;
  std::map<CorrelatorKey, Entry> entries_;
};

class IntersectionNumbers {
 public:
  explicit IntersectionNumbers(QuadraticRange range = QuadraticRange::FromZero) : range_(range) {
    for (int n = -1; n <= 8; ++n) operators_.push_back(virasoro_operator(n, range_));
  }

  QuadraticRange range() const noexcept { return range_; }
  CorrelatorStore& store() noexcept { return store_; }
  const CorrelatorStore& store() const noexcept { return store_; }

  /// Fix a value before it is computed; the recursion then builds on it.
  /// Used to study how a single wrong value propagates.
  void pin(const CorrelatorKey& key, const Rational& value) {
    key.validate();
    store_.insert(key, value, "pinned");
  }

  Rational correlator(int g, std::vector<int> indices) { return correlator(CorrelatorKey(g, std::move(indices))); }

  Rational correlator(const CorrelatorKey& key) {
    key.validate();
    return value(key);
  }

 private:
  const VirasoroOperator& op(int n) {
    while (static_cast<int>(operators_.size()) <= n + 1) {
      operators_.push_back(virasoro_operator(static_cast<int>(operators_.size()) - 1, range_));
    }
    return operators_[static_cast<std::size_t>(n + 1)];
  }

  /// Value of a possibly unstable or dimension-mismatched key (zero there).
  Rational value(const CorrelatorKey& key) {
    if (key.g < 0 || !key.stable() || !key.dimension_matches()) return 0;
    if (auto hit = store_.find(key)) return hit->value;
    budget::checkpoint();
    std::string provenance;
    Rational v = compute(key, provenance);
    store_.insert(key, v, provenance);
    return v;
  }

  Rational compute(const CorrelatorKey& key, std::string& provenance) {
    const int m = key.d.back();
    std::vector<int> rest(key.d.begin(), key.d.end() - 1);
    if (m == 0) {
      // L_{-1}: <tau_0 S> = sum_j <tau_{d_j - 1} S\j> + [g = 0, S = {0,0}]; here S is all zeros
      provenance = "L-1";
      return (key.g == 0 && rest.size() == 2) ? op(-1).potential * 2 : Rational(0);
    }
    const int n = m - 1;
    const VirasoroOperator L = op(n);  // copy: recursion may grow operators_
    provenance = "L" + std::to_string(n);
    Rational acc = 0;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      std::vector<int> s = rest;
      s[j] += n;
      acc += L.linear(rest[j]) * value(CorrelatorKey(key.g, s));
    }
    for (const auto& q : L.quadratic) {
      std::vector<int> s = rest;
      s.push_back(q.a);
      s.push_back(q.b);
      Rational term = value(CorrelatorKey(key.g - 1, s));
      term += split_sum(key.g, rest, q.a, q.b);
      acc += q.coefficient * term;
    }
    if (key.g == 1 && rest.empty()) acc += L.constant;
    return acc / (-L.shift);
  }

  /// sum over g1 + g2 = g and labelled splits I + J = S of <tau_a I>_{g1} <tau_b J>_{g2}
  Rational split_sum(int g, const std::vector<int>& s, int a, int b) {
    Rational total = 0;
    const std::size_t count = s.size();
    for (unsigned long mask = 0; mask < (1UL << count); ++mask) {
      std::vector<int> left{a}, right{b};
      for (std::size_t i = 0; i < count; ++i) ((mask >> i) & 1UL ? left : right).push_back(s[i]);
      for (int g1 = 0; g1 <= g; ++g1) {
        CorrelatorKey kl(g1, left);
        if (!kl.stable() || !kl.dimension_matches()) continue;
        CorrelatorKey kr(g - g1, right);
        if (!kr.stable() || !kr.dimension_matches()) continue;
        total += value(kl) * value(kr);
      }
    }
    return total;
  }

  QuadraticRange range_;
  std::vector<VirasoroOperator> operators_;
  CorrelatorStore store_;
};

/// Sorted index multisets of length n with entries <= max_index and the given sum.
inline std::vector<std::vector<int>> index_multisets(int n, int sum, int max_index) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int lo) -> void {
    const int slots = n - static_cast<int>(cur.size());
    if (slots == 0) {
      if (remaining == 0) out.push_back(cur);
      return;
    }
    for (int v = lo; v <= std::min(max_index, remaining); ++v) {
      if (static_cast<long>(v) * slots > remaining) break;
      cur.push_back(v);
      self(self, remaining - v, v);
      cur.pop_back();
    }
  };
  if (n >= 0 && sum >= 0) rec(rec, sum, 0);
  return out;
}

/// Exponent vector over t_0..t_K for an index multiset.
inline std::vector<int> exponents_of(const std::vector<int>& indices, int K) {
  std::vector<int> e(static_cast<std::size_t>(K) + 1, 0);
  for (int x : indices) e[static_cast<std::size_t>(x)] += 1;
  return e;
}

/// Symmetry factor prod_k e_k! of an index multiset.
inline Integer automorphisms(const std::vector<int>& indices) {
  std::map<int, int> mult;
  for (int x : indices) ++mult[x];
  Integer out = 1;
  for (const auto& [x, m] : mult) out *= factorial(m);
  return out;
}

/// Truncation of F = sum_g hbar^{2g-2} F_g. The coefficient of
/// hbar^{2g-2} prod t_k^{e_k} is <prod tau_k^{e_k}>_g / prod e_k!.
///
/// F has terms at hbar^{-2} in every degree >= 3, so the window is always
/// widened down to Hmin = -2: dropping them would leave a series whose low
/// coefficients are not those of F.
inline TruncatedSeries f_truncated(TruncationSpec spec, IntersectionNumbers& numbers) {
  spec.validate(VariableFamily::T);
  spec.h_min = std::min(spec.h_min, -2);
  TruncatedSeries F(VariableFamily::T, spec);
  for (int g = 0; 2 * g - 2 <= spec.h_max; ++g) {
    for (int n = 1; n <= spec.D; ++n) {
      if (2 * g - 2 + n <= 0) continue;
      const int dim = 3 * g - 3 + n;
      for (const auto& idx : index_multisets(n, dim, spec.K)) {
        budget::checkpoint();
        Rational v = numbers.correlator(g, idx) / Rational(automorphisms(idx));
        if (v != 0) F.set(2 * g - 2, exponents_of(idx, spec.K), v);
      }
    }
  }
  return F;
}

inline TruncatedSeries f_truncated(const TruncationSpec& spec) {
  IntersectionNumbers numbers;
  return f_truncated(spec, numbers);
}

/// Second route to the correlators: the coefficient of hbar^{2g-2} t^e in
/// e^{-F} L_n e^F = 0, written directly in the coefficients f of F, is
///
///   sum_k linear(k) [t^e](t_k F_{n+k}) + shift [t^e] F_{n+1}
///     + sum c_ab ([t^e] F_{ab}|_{g-1} + sum_{g1+g2=g} [t^e](F_a|_{g1} F_b|_{g2}))
///     + constant + potential = 0.
///
/// The quadratic terms only involve lower levels. Equations whose products
/// are already known are collected into one exact linear system over the
/// remaining unknowns; values it determines are fixed and the sweep repeats.
class VirasoroLinearSystem {
 public:
  VirasoroLinearSystem(int max_dimension, int max_genus, int max_n = 3,
                       QuadraticRange range = QuadraticRange::FromZero)
      : max_dim_(max_dimension), max_genus_(max_genus), max_n_(max_n) {
    for (int n = -1; n <= max_n_; ++n) operators_.push_back(virasoro_operator(n, range));
    for (int g = 0; g <= max_genus_; ++g) {
      for (int npts = 1; 3 * g - 3 + npts <= max_dim_; ++npts) {
        if (2 * g - 2 + npts <= 0) continue;
        const int dim = 3 * g - 3 + npts;
        for (auto& idx : index_multisets(npts, dim, dim)) {
          CorrelatorKey key(g, idx);
          column_.emplace(key, static_cast<int>(keys_.size()));
          keys_.push_back(key);
        }
      }
    }
  }

  const std::vector<CorrelatorKey>& keys() const noexcept { return keys_; }
  int equations_used() const noexcept { return equations_used_; }
  int sweeps() const noexcept { return sweeps_; }

  /// Solves for every key; throws IntegrityError on inconsistency or if a
  /// key is left undetermined.
  std::map<CorrelatorKey, Rational> solve() {
    known_.clear();
    equations_used_ = 0;
    sweeps_ = 0;
    std::vector<Equation> pending = build_equations();
    ExactEchelon system(static_cast<int>(keys_.size()));
    while (known_.size() < keys_.size()) {
      ++sweeps_;
      std::vector<Equation> later;
      int added = 0;
      for (auto& eq : pending) {
        budget::checkpoint();
        SparseRow row;
        Rational rhs;
        if (!assemble(eq, row, rhs)) {
          later.push_back(std::move(eq));
          continue;
        }
        ++added;
        if (system.add_row(std::move(row), -rhs) == ExactEchelon::Outcome::Inconsistent) {
          throw IntegrityError("inconsistent Virasoro coefficient equation (L_" + std::to_string(eq.n) + ")");
        }
      }
      equations_used_ += added;
      auto values = system.determined_values();
      std::size_t before = known_.size();
      for (std::size_t c = 0; c < values.size(); ++c) {
        if (values[c]) known_.emplace(keys_[c], *values[c]);
      }
      if (known_.size() == before) {
        std::string missing;
        for (const auto& key : keys_) {
          if (!known_.count(key)) missing += " " + key.str();
        }
        throw IntegrityError("Virasoro linear system leaves correlators undetermined:" + missing);
      }
      pending = std::move(later);
    }
    // equations not yet used (their products became known only now) must hold as well
    for (auto& eq : pending) {
      SparseRow row;
      Rational rhs;
      if (!assemble(eq, row, rhs)) continue;
      Rational lhs = rhs;
      for (const auto& [c, v] : row) lhs += v * known_.at(keys_[static_cast<std::size_t>(c)]);
      if (lhs != 0) throw IntegrityError("Virasoro coefficient equation violated after solving");
      ++equations_used_;
    }
    return known_;
  }

 private:
  struct Equation {
    int n;
    int g;
    std::map<int, int> e;  // index -> exponent
  };

  using Exponents = std::map<int, int>;

  static Exponents bump(Exponents e, int index, int by) {
    e[index] += by;
    if (e[index] == 0) e.erase(index);
    return e;
  }

  static std::vector<int> indices_of(const Exponents& e) {
    std::vector<int> out;
    for (const auto& [k, m] : e) out.insert(out.end(), static_cast<std::size_t>(m), k);
    return out;
  }

  static int exponent(const Exponents& e, int index) {
    auto it = e.find(index);
    return it == e.end() ? 0 : it->second;
  }

  std::vector<Equation> build_equations() const {
    std::vector<Equation> out;
    for (const auto& key : keys_) {
      std::set<int> distinct(key.d.begin(), key.d.end());
      for (int v : distinct) {
        if (v - 1 > max_n_) continue;
        Exponents e;
        for (int x : key.d) ++e[x];
        out.push_back({v - 1, key.g, bump(e, v, -1)});
      }
    }
    return out;
  }

  /// Coefficient f(g, e) of F as either a known number or an unknown column.
  /// Returns false when it is an unknown that must already be known.
  struct Term {
    bool known;
    Rational value;  // if known
    int column;      // otherwise
  };

  Term coefficient(int g, const Exponents& e) const {
    CorrelatorKey key(g, indices_of(e));
    if (g < 0 || !key.stable() || !key.dimension_matches()) return {true, 0, -1};
    auto it = known_.find(key);
    Integer aut = automorphisms(key.d);
    if (it != known_.end()) return {true, it->second / Rational(aut), -1};
    auto col = column_.find(key);
    if (col == column_.end()) throw IntegrityError("key " + key.str() + " outside the solved set");
    return {false, Rational(1) / Rational(aut), col->second};
  }

  /// Adds factor * f(g, e) to the row or the constant.
  void add(SparseRow& row, Rational& rhs, const Rational& factor, int g, const Exponents& e) const {
    if (factor == 0) return;
    Term t = coefficient(g, e);
    if (t.known) {
      rhs += factor * t.value;
    } else {
      row[t.column] += factor * t.value;
    }
  }

  /// [t^e] of the first derivative F_a at genus g: (e_a + 1) f(g, e + delta_a).
  bool derivative_known(int g, const Exponents& e, int a, Rational& out) const {
    Term t = coefficient(g, bump(e, a, 1));
    if (!t.known) return false;
    out = Rational(exponent(e, a) + 1) * t.value;
    return true;
  }

  bool assemble(const Equation& eq, SparseRow& row, Rational& rhs) const {
    const VirasoroOperator& L = operators_[static_cast<std::size_t>(eq.n + 1)];
    rhs = 0;
    row.clear();
    // quadratic products first: every factor must be known
    for (const auto& q : L.quadratic) {
      Rational products = 0;
      std::vector<std::pair<int, int>> items(eq.e.begin(), eq.e.end());
      std::vector<int> take(items.size(), 0);
      auto rec = [&](auto&& self, std::size_t i) -> bool {
        if (i == items.size()) {
          Exponents left, right;
          for (std::size_t j = 0; j < items.size(); ++j) {
            if (take[j]) left[items[j].first] = take[j];
            if (items[j].second - take[j]) right[items[j].first] = items[j].second - take[j];
          }
          for (int g1 = 0; g1 <= eq.g; ++g1) {
            Rational fa, fb;
            if (!derivative_known(g1, left, q.a, fa)) return false;
            if (fa == 0) continue;
            if (!derivative_known(eq.g - g1, right, q.b, fb)) return false;
            products += fa * fb;
          }
          return true;
        }
        for (int c = 0; c <= items[i].second; ++c) {
          take[i] = c;
          if (!self(self, i + 1)) return false;
        }
        return true;
      };
      if (!rec(rec, 0)) return false;
      rhs += q.coefficient * products;
      // second derivative at genus g - 1
      Exponents e2 = bump(bump(eq.e, q.a, 1), q.b, 1);
      Rational mult = q.a == q.b ? Rational((exponent(eq.e, q.a) + 2) * (exponent(eq.e, q.a) + 1))
                                 : Rational((exponent(eq.e, q.a) + 1) * (exponent(eq.e, q.b) + 1));
      add(row, rhs, q.coefficient * mult, eq.g - 1, e2);
    }
    // linear terms t_k F_{n+k}
    for (const auto& [k, m] : eq.e) {
      Rational lin = L.linear(k);
      if (lin == 0 || eq.n + k < 0) continue;
      Exponents e1 = bump(bump(eq.e, k, -1), eq.n + k, 1);
      add(row, rhs, lin * Rational(exponent(e1, eq.n + k)), eq.g, e1);
    }
    // shift term
    add(row, rhs, L.shift * Rational(exponent(eq.e, eq.n + 1) + 1), eq.g, bump(eq.e, eq.n + 1, 1));
    if (eq.g == 1 && eq.e.empty()) rhs += L.constant;
    if (eq.g == 0 && eq.e == Exponents{{0, 2}}) rhs += L.potential;
    for (auto it = row.begin(); it != row.end();) it = it->second == 0 ? row.erase(it) : std::next(it);
    return true;
  }

  int max_dim_;
  int max_genus_;
  int max_n_;
  std::vector<VirasoroOperator> operators_;
  std::vector<CorrelatorKey> keys_;
  std::map<CorrelatorKey, int> column_;
  std::map<CorrelatorKey, Rational> known_;
  int equations_used_ = 0;
  int sweeps_ = 0;
};

}  // namespace hodgekit
