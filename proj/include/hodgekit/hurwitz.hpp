#pragma once

// Transposition factorizations in S_d and Hurwitz numbers.
//
// Convention: a factorization of a target permutation is an ordered tuple
// (tau_1, ..., tau_r) of transpositions with tau_r ... tau_1 = target, where
// permutations act on the left. Permutations are given as image sequences over
// {1..d}.

#include <algorithm>
#include <future>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "hodgekit/budget.hpp"
#include "hodgekit/combinatorics.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/partition.hpp"
#include "hodgekit/rational.hpp"

namespace hodgekit {

struct FactorizationInstance {
  int d = 1;
  std::vector<int> target;  ///< target[i-1] = image of i
  int r = 0;
  bool transitive_required = true;

  void validate() const {
    if (d < 1) throw InvalidInput("degree must be >= 1");
    if (r < 0) throw InvalidInput("number of transpositions must be >= 0");
    if (static_cast<int>(target.size()) != d) throw InvalidInput("target must list d images");
    std::vector<bool> seen(static_cast<std::size_t>(d), false);
    for (int x : target) {
      if (x < 1 || x > d || seen[static_cast<std::size_t>(x - 1)]) throw InvalidInput("target is not a bijection of {1..d}");
      seen[static_cast<std::size_t>(x - 1)] = true;
    }
  }
};

/// Cycle lengths of a permutation given by 1-based images.
inline Partition cycle_type(const std::vector<int>& images) {
  std::vector<bool> seen(images.size(), false);
  std::vector<int> lengths;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(images[j] - 1)) {
      seen[j] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  return Partition(lengths);
}

/// A permutation with the given cycle type: consecutive blocks, each a cycle.
inline std::vector<int> permutation_of_type(const Partition& type) {
  std::vector<int> images;
  int start = 1;
  for (int len : type.parts()) {
    for (int i = 0; i < len; ++i) images.push_back(start + (i + 1) % len);
    start += len;
  }
  return images;
}

inline Integer class_size(const Partition& type) {
  Integer denom = 1;
  for (int p : type.parts()) denom *= p;
  for (const auto& [p, m] : type.multiplicities()) denom *= factorial(m);
  return factorial(type.weight()) / denom;
}

// ---------------------------------------------------------------------------
// Engine (a): depth-first search

namespace detail {

/// Union-find with an undo log; no path compression so every union is one
/// reversible parent assignment.
class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1), components_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) const {
    while (parent_[static_cast<std::size_t>(x)] != x) x = parent_[static_cast<std::size_t>(x)];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) {
      log_.push_back(-1);
      return;
    }
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    --components_;
    log_.push_back(b);
  }
  void rollback() {
    const int b = log_.back();
    log_.pop_back();
    if (b < 0) return;
    const int a = parent_[static_cast<std::size_t>(b)];
    size_[static_cast<std::size_t>(a)] -= size_[static_cast<std::size_t>(b)];
    parent_[static_cast<std::size_t>(b)] = b;
    ++components_;
  }
  int components() const noexcept { return components_; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int components_;
  std::vector<int> log_;
};

class FactorizationSearch {
 public:
  explicit FactorizationSearch(const FactorizationInstance& inst) : inst_(inst), uf_(inst.d) {
    for (int a = 0; a < inst.d; ++a) {
      for (int b = a + 1; b < inst.d; ++b) transpositions_.emplace_back(a, b);
    }
    // sigma = target * P^{-1} with P the product chosen so far; initially the target
    sigma_.resize(static_cast<std::size_t>(inst.d));
    for (int i = 0; i < inst.d; ++i) sigma_[static_cast<std::size_t>(i)] = inst.target[static_cast<std::size_t>(i)] - 1;
    distance_ = inst.d - cycle_type(inst.target).length();
  }

  std::size_t transposition_count() const noexcept { return transpositions_.size(); }

  Integer count_with_first(std::size_t first) {
    if (inst_.r == 0) return first == 0 ? Integer(leaf() ? 1 : 0) : Integer(0);
    return step(first, inst_.r);
  }

  Integer count_all() {
    if (inst_.r == 0) return leaf() ? 1 : 0;
    Integer total = 0;
    for (std::size_t t = 0; t < transpositions_.size(); ++t) total += step(t, inst_.r);
    return total;
  }

 private:
  bool leaf() const { return distance_ == 0 && (!inst_.transitive_required || uf_.components() == 1); }

  bool same_cycle(int a, int b) const {
    for (int x = sigma_[static_cast<std::size_t>(a)];; x = sigma_[static_cast<std::size_t>(x)]) {
      if (x == b) return true;
      if (x == a) return false;
    }
  }

  /// Choose transposition t as the next factor with `remaining` factors left (including t).
  Integer step(std::size_t t, int remaining) {
    const auto [a, b] = transpositions_[t];
    const int delta = same_cycle(a, b) ? -1 : 1;  // sigma * (a b) splits or merges a cycle
    const int dist = distance_ + delta;
    const int left = remaining - 1;
    if (dist > left || ((left - dist) & 1)) return 0;
    std::swap(sigma_[static_cast<std::size_t>(a)], sigma_[static_cast<std::size_t>(b)]);
    distance_ = dist;
    uf_.unite(a, b);
    Integer total = 0;
    if (!inst_.transitive_required || uf_.components() - 1 <= left) {
      if (left == 0) {
        total = leaf() ? 1 : 0;
      } else {
        budget::checkpoint();
        for (std::size_t u = 0; u < transpositions_.size(); ++u) total += step(u, left);
      }
    }
    uf_.rollback();
    distance_ -= delta;
    std::swap(sigma_[static_cast<std::size_t>(a)], sigma_[static_cast<std::size_t>(b)]);
    return total;
  }

  const FactorizationInstance& inst_;
  RollbackUnionFind uf_;
  std::vector<std::pair<int, int>> transpositions_;
  std::vector<int> sigma_;
  int distance_;
};

}  // namespace detail

/// Number of transpositions available as tau_1.
inline std::size_t first_factor_choices(const FactorizationInstance& inst) {
  return static_cast<std::size_t>(inst.d) * static_cast<std::size_t>(inst.d - 1) / 2;
}

/// DFS count restricted to tau_1 = the `first`-th transposition (lexicographic
/// order on pairs). Summing over all choices gives count_dfs.
inline Integer count_with_first(const FactorizationInstance& inst, std::size_t first) {
  inst.validate();
  detail::FactorizationSearch search(inst);
  return search.count_with_first(first);
}

/// DFS engine; with threads > 1 the search is split by the first factor.
inline Integer count_dfs(const FactorizationInstance& inst, unsigned threads = 1) {
  inst.validate();
  if (threads <= 1 || inst.r == 0) {
    detail::FactorizationSearch search(inst);
    return search.count_all();
  }
  const std::size_t choices = first_factor_choices(inst);
  std::vector<std::future<Integer>> parts;
  for (unsigned w = 0; w < threads; ++w) {
    parts.push_back(std::async(std::launch::async, [&inst, w, threads, choices] {
      Integer sum = 0;
      detail::FactorizationSearch search(inst);
      for (std::size_t t = w; t < choices; t += threads) sum += search.count_with_first(t);
      return sum;
    }));
  }
  Integer total = 0;
  for (auto& f : parts) total += f.get();
  return total;
}

// ---------------------------------------------------------------------------
// Engine (b): class-algebra dynamic programming + inclusion-exclusion

/// Powers of the transposition class sum T acting in the centre of the group
/// algebra of S_d. A central element is a vector of per-element coefficients
/// indexed by cycle type.
class ClassAlgebra {
 public:
  explicit ClassAlgebra(int d) : d_(d), classes_(partitions_of(d)) {
    for (std::size_t i = 0; i < classes_.size(); ++i) index_.emplace(classes_[i].parts(), i);
    transitions_.resize(classes_.size());
    for (std::size_t i = 0; i < classes_.size(); ++i) build_transitions(i);
  }

  int degree() const noexcept { return d_; }
  const std::vector<Partition>& classes() const noexcept { return classes_; }
  std::size_t index_of(const Partition& p) const { return index_.at(p.parts()); }

  /// Per-element coefficients of x * T.
  std::vector<Integer> times_T(const std::vector<Integer>& x) const {
    std::vector<Integer> out(classes_.size());
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      for (const auto& [j, w] : transitions_[i]) {
        if (x[j] != 0) out[i] += w * x[j];
      }
    }
    return out;
  }

  std::vector<Integer> basis(const Partition& p) const {
    std::vector<Integer> v(classes_.size());
    v[index_of(p)] = 1;
    return v;
  }

 private:
  // For pi of class i, the classes of pi * tau over all transpositions tau.
  void build_transitions(std::size_t i) {
    const auto& parts = classes_[i].parts();
    std::map<std::size_t, long> acc;
    auto add = [&](std::vector<int> q, long w) {
      std::sort(q.begin(), q.end(), std::greater<>());
      acc[index_.at(q)] += w;
    };
    // join two distinct cycles
    for (std::size_t a = 0; a < parts.size(); ++a) {
      for (std::size_t b = a + 1; b < parts.size(); ++b) {
        std::vector<int> q;
        for (std::size_t c = 0; c < parts.size(); ++c) {
          if (c != a && c != b) q.push_back(parts[c]);
        }
        q.push_back(parts[a] + parts[b]);
        add(q, static_cast<long>(parts[a]) * parts[b]);
      }
    }
    // cut one cycle into (k, c - k)
    for (std::size_t a = 0; a < parts.size(); ++a) {
      const int c = parts[a];
      for (int k = 1; 2 * k <= c; ++k) {
        std::vector<int> q;
        for (std::size_t x = 0; x < parts.size(); ++x) {
          if (x != a) q.push_back(parts[x]);
        }
        q.push_back(k);
        q.push_back(c - k);
        add(q, 2 * k == c ? c / 2 : c);
      }
    }
    for (const auto& [j, w] : acc) transitions_[i].emplace_back(j, Integer(w));
  }

  struct VectorHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
      std::size_t h = v.size();
      for (int x : v) h = h * 1000003u + static_cast<std::size_t>(x);
      return h;
    }
  };

  int d_;
  std::vector<Partition> classes_;
  std::unordered_map<std::vector<int>, std::size_t, VectorHash> index_;
  std::vector<std::vector<std::pair<std::size_t, Integer>>> transitions_;
};

/// Caches class-algebra powers and transitive counts. Thread-safe.
class HurwitzEngine {
 public:
  /// Number of tuples of r transpositions with product a fixed permutation of
  /// the given cycle type (no transitivity requirement).
  Integer unrestricted(const Partition& type, int r) {
    const int d = type.weight();
    const int c = type.length();
    if (r < d - c || ((r - d + c) & 1)) return 0;
    std::lock_guard lock(mutex_);
    auto& powers = identity_powers(d, r);
    return powers[static_cast<std::size_t>(r)][algebra(d).index_of(type)];
  }

  /// Number of transitive tuples of r transpositions with product a fixed
  /// permutation of the given cycle type.
  Integer transitive(const Partition& type, int r) {
    const int d = type.weight();
    const int c = type.length();
    if (r < d + c - 2 || ((r - d - c) & 1)) return 0;
    if (d == 1) return r == 0 ? 1 : 0;
    {
      std::lock_guard lock(mutex_);
      auto it = transitive_.find({type.parts(), r});
      if (it != transitive_.end()) return it->second;
    }
    budget::checkpoint();
    // The orbit containing the first cycle is a union B of cycles; the other
    // cycles form an arbitrary factorization, and the r slots interleave.
    const auto& parts = type.parts();
    const std::size_t m = parts.size();
    Integer result = unrestricted(type, r);
    for (unsigned long mask = 0; mask + 1 < (1UL << (m - 1)); ++mask) {
      std::vector<int> inside{parts[0]}, outside;
      for (std::size_t i = 1; i < m; ++i) ((mask >> (i - 1)) & 1UL ? inside : outside).push_back(parts[i]);
      Partition pb(inside), pc(outside);
      for (int r1 = 0; r1 <= r; ++r1) {
        Integer t = transitive(pb, r1);
        if (t == 0) continue;
        Integer u = unrestricted(pc, r - r1);
        if (u == 0) continue;
        result -= binomial(r, r1) * t * u;
      }
    }
    std::lock_guard lock(mutex_);
    transitive_.emplace(std::make_pair(type.parts(), r), result);
    return result;
  }

  /// Per-element coefficient of the class beta in C_(d) * T^r, with C_(d) the
  /// sum of all d-cycles.
  Integer dcycle_times_T(const Partition& beta, int r) {
    const int d = beta.weight();
    std::lock_guard lock(mutex_);
    auto& powers = cycle_powers(d, r);
    return powers[static_cast<std::size_t>(r)][algebra(d).index_of(beta)];
  }

 private:
  const ClassAlgebra& algebra(int d) {
    auto it = algebras_.find(d);
    if (it == algebras_.end()) it = algebras_.emplace(d, std::make_unique<ClassAlgebra>(d)).first;
    return *it->second;
  }

  std::vector<std::vector<Integer>>& extend(std::vector<std::vector<Integer>>& powers, int d, int r) {
    const ClassAlgebra& alg = algebra(d);
    while (static_cast<int>(powers.size()) <= r) {
      budget::checkpoint();
      powers.push_back(alg.times_T(powers.back()));
    }
    return powers;
  }

  std::vector<std::vector<Integer>>& identity_powers(int d, int r) {
    auto& powers = identity_powers_[d];
    if (powers.empty()) powers.push_back(algebra(d).basis(Partition(std::vector<int>(static_cast<std::size_t>(d), 1))));
    return extend(powers, d, r);
  }

  std::vector<std::vector<Integer>>& cycle_powers(int d, int r) {
    auto& powers = cycle_powers_[d];
    if (powers.empty()) powers.push_back(algebra(d).basis(Partition({d})));
    return extend(powers, d, r);
  }

  std::recursive_mutex mutex_;
  std::map<int, std::unique_ptr<ClassAlgebra>> algebras_;
  std::map<int, std::vector<std::vector<Integer>>> identity_powers_;
  std::map<int, std::vector<std::vector<Integer>>> cycle_powers_;
  std::map<std::pair<std::vector<int>, int>, Integer> transitive_;
};

inline HurwitzEngine& default_hurwitz_engine() {
  static HurwitzEngine engine;
  return engine;
}

enum class CountingEngine { DepthFirst, ClassAlgebra };

inline Integer count_transitive_factorizations(const FactorizationInstance& inst,
                                               CountingEngine engine = CountingEngine::ClassAlgebra) {
  inst.validate();
  if (engine == CountingEngine::DepthFirst) return count_dfs(inst);
  Partition type = cycle_type(inst.target);
  auto& e = default_hurwitz_engine();
  return inst.transitive_required ? e.transitive(type, inst.r) : e.unrestricted(type, inst.r);
}

/// r = 2g + d + n - 2 simple branch points for genus g covers with profile alpha over infinity.
inline int single_hurwitz_r(int g, const Partition& alpha) { return 2 * g + alpha.weight() + alpha.length() - 2; }

/// H^g_alpha: transitive factorizations of a fixed permutation of type alpha,
/// with labelled cycles, divided by d!; equals Trans(alpha, r) / prod alpha_i.
inline Rational single_hurwitz(int g, const Partition& alpha, HurwitzEngine& engine = default_hurwitz_engine()) {
  if (alpha.length() == 0) throw InvalidInput("alpha must be a nonempty partition");
  if (g < 0) throw InvalidInput("negative genus");
  const int r = single_hurwitz_r(g, alpha);
  if (r < 0) throw InvalidInput("negative number of branch points");
  Integer prod = 1;
  for (int a : alpha.parts()) prod *= a;
  return make_rational(engine.transitive(alpha, r), prod);
}

/// Same number, counting factorizations of permutation_of_type(alpha) with the chosen engine.
inline Rational single_hurwitz(int g, const Partition& alpha, CountingEngine engine) {
  if (alpha.length() == 0) throw InvalidInput("alpha must be a nonempty partition");
  if (g < 0) throw InvalidInput("negative genus");
  const int r = single_hurwitz_r(g, alpha);
  Integer prod = 1;
  for (int a : alpha.parts()) prod *= a;
  FactorizationInstance inst{alpha.weight(), permutation_of_type(alpha), r, true};
  return make_rational(count_transitive_factorizations(inst, engine), prod);
}

/// r = 2g + n - 1 for one-part double Hurwitz numbers (Riemann-Hurwitz with a
/// full cycle over 0 and beta over infinity).
inline int double_hurwitz_r(int g, const Partition& beta) { return 2 * g + beta.length() - 1; }

/// H^g_{(d),beta} = (per-element coefficient of beta in C_(d) T^r) / prod beta_i.
inline Rational double_hurwitz_one_part(int g, int d, const Partition& beta,
                                        HurwitzEngine& engine = default_hurwitz_engine()) {
  if (beta.weight() != d) throw InvalidInput("|beta| must equal d");
  if (g < 0) throw InvalidInput("negative genus");
  const int r = double_hurwitz_r(g, beta);
  if (r < 0) throw InvalidInput("negative number of branch points");
  Integer prod = 1;
  for (int b : beta.parts()) prod *= b;
  return make_rational(engine.dcycle_times_T(beta, r), prod);
}

}  // namespace hodgekit
