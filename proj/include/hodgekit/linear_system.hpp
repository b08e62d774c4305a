#pragma once

#include <map>
#include <optional>
#include <vector>

#include "hodgekit/budget.hpp"
#include "hodgekit/errors.hpp"
#include "hodgekit/rational.hpp"

namespace hodgekit {

/// Sparse row: column -> coefficient, no stored zeros.
using SparseRow = std::map<int, Rational>;

/// Incremental exact Gaussian elimination over the rationals.
///
/// Rows are reduced against the current pivots as they arrive, so a row that
/// contradicts earlier ones is reported immediately. Pivot rows are kept
/// monic with all other entries to the right of the pivot.
class ExactEchelon {
 public:
  enum class Outcome { Pivot, Redundant, Inconsistent };

  explicit ExactEchelon(int unknowns) : unknowns_(unknowns) {
    if (unknowns < 0) throw InvalidInput("negative number of unknowns");
  }

  Outcome add_row(SparseRow row, Rational rhs) {
    budget::checkpoint();
    strip_zeros(row);
    while (!row.empty()) {
      auto [col, coeff] = *row.begin();
      if (col < 0 || col >= unknowns_) throw InvalidInput("column out of range");
      auto it = pivot_of_.find(col);
      if (it == pivot_of_.end()) {
        Rational inv = 1 / coeff;
        for (auto& [c, v] : row) v *= inv;
        rhs *= inv;
        pivot_of_[col] = static_cast<int>(rows_.size());
        rows_.push_back({std::move(row), std::move(rhs)});
        return Outcome::Pivot;
      }
      const auto& pivot = rows_[static_cast<std::size_t>(it->second)];
      Rational factor = coeff;
      for (const auto& [c, v] : pivot.row) {
        Rational& slot = row[c];
        slot -= factor * v;
        if (slot == 0) row.erase(c);
      }
      rhs -= factor * pivot.rhs;
    }
    return rhs == 0 ? Outcome::Redundant : Outcome::Inconsistent;
  }

  int rank() const noexcept { return static_cast<int>(rows_.size()); }
  int unknowns() const noexcept { return unknowns_; }

  /// Reduced row echelon form; a pivot variable is determined when its row
  /// involves no free variable. Free and undetermined variables give nullopt.
  std::vector<std::optional<Rational>> determined_values() const {
    std::vector<Row> reduced = rows_;
    std::map<int, std::size_t> pivot_row;
    for (const auto& [col, idx] : pivot_of_) pivot_row[col] = static_cast<std::size_t>(idx);
    // eliminate pivot columns right-to-left
    for (auto it = pivot_row.rbegin(); it != pivot_row.rend(); ++it) {
      budget::checkpoint();
      const int col = it->first;
      const Row& p = reduced[it->second];
      for (auto& [other_col, idx] : pivot_row) {
        if (other_col >= col) break;
        Row& r = reduced[idx];
        auto f = r.row.find(col);
        if (f == r.row.end()) continue;
        Rational factor = f->second;
        for (const auto& [c, v] : p.row) {
          Rational& slot = r.row[c];
          slot -= factor * v;
          if (slot == 0) r.row.erase(c);
        }
        r.rhs -= factor * p.rhs;
      }
    }
    std::vector<std::optional<Rational>> out(static_cast<std::size_t>(unknowns_));
    for (const auto& [col, idx] : pivot_row) {
      const Row& r = reduced[idx];
      if (r.row.size() == 1) out[static_cast<std::size_t>(col)] = r.rhs;
    }
    return out;
  }

 private:
  struct Row {
    SparseRow row;
    Rational rhs;
  };

  static void strip_zeros(SparseRow& row) {
    for (auto it = row.begin(); it != row.end();) {
      if (it->second == 0) {
        it = row.erase(it);
      } else {
        ++it;
      }
    }
  }

  int unknowns_;
  std::vector<Row> rows_;
  std::map<int, int> pivot_of_;
};

}  // namespace hodgekit
