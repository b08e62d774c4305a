#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hodgekit/errors.hpp"

namespace hodgekit {

/// Integer partition with parts stored non-increasing.
class Partition {
 public:
  Partition() = default;

  /// Sorts the parts; every part must be positive.
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (int p : parts_) {
      if (p <= 0) throw InvalidInput("partition parts must be positive");
    }
    std::sort(parts_.begin(), parts_.end(), std::greater<>());
  }

  const std::vector<int>& parts() const noexcept { return parts_; }
  int length() const noexcept { return static_cast<int>(parts_.size()); }
  int weight() const noexcept {
    int w = 0;
    for (int p : parts_) w += p;
    return w;
  }
  int operator[](std::size_t i) const { return parts_[i]; }

  /// part size -> multiplicity
  std::map<int, int> multiplicities() const {
    std::map<int, int> m;
    for (int p : parts_) ++m[p];
    return m;
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts_[i]);
    }
    return s + ")";
  }

  auto operator<=>(const Partition&) const = default;

 private:
  std::vector<int> parts_;
};

namespace detail {
inline void partitions_rec(int remaining, int max_part, std::vector<int>& prefix,
                           std::optional<int> length, std::vector<Partition>& out) {
  if (remaining == 0) {
    if (!length || static_cast<int>(prefix.size()) == *length) out.emplace_back(prefix);
    return;
  }
  if (length && static_cast<int>(prefix.size()) >= *length) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    if (length) {
      int slots = *length - static_cast<int>(prefix.size());
      // remaining parts are each <= p, so at most slots * p can still be placed
      if (static_cast<long>(slots) * p < remaining) break;
    }
    prefix.push_back(p);
    partitions_rec(remaining - p, p, prefix, length, out);
    prefix.pop_back();
  }
}
}  // namespace detail

/// All partitions of d in reverse-lexicographic order, optionally of fixed length.
inline std::vector<Partition> partitions_of(int d, std::optional<int> length = std::nullopt) {
  if (d <= 0) throw InvalidInput("partitions_of requires d >= 1");
  if (length && *length <= 0) throw InvalidInput("length filter must be positive");
  std::vector<Partition> out;
  std::vector<int> prefix;
  detail::partitions_rec(d, d, prefix, length, out);
  return out;
}

/// Partitions with exactly n parts, every part in [1, max_part], ordered by
/// weight and then reverse-lexicographically.
inline std::vector<Partition> bounded_partitions(int n, int max_part) {
  if (n <= 0 || max_part <= 0) throw InvalidInput("bounded_partitions needs n, max_part >= 1");
  std::vector<Partition> out;
  for (int d = n; d <= n * max_part; ++d) {
    for (auto& p : partitions_of(d, n)) {
      if (p[0] <= max_part) out.push_back(p);
    }
  }
  return out;
}

/// Non-increasing exponent vectors of length n (zeros allowed) with the given sum.
inline std::vector<std::vector<int>> exponent_partitions(int sum, int n) {
  std::vector<std::vector<int>> out;
  if (sum < 0 || n <= 0) return out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int remaining, int max_part) {
    if (static_cast<int>(cur.size()) == n) {
      if (remaining == 0) out.push_back(cur);
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 0; --p) {
      int slots = n - static_cast<int>(cur.size());
      if (static_cast<long>(slots) * p < remaining) break;
      cur.push_back(p);
      rec(remaining - p, p);
      cur.pop_back();
    }
  };
  rec(sum, sum);
  return out;
}

}  // namespace hodgekit
