#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace v2x {

inline constexpr double kForbidden = -std::numeric_limits<double>::infinity();

/// Dense row-major weight matrix. -infinity marks a forbidden pair.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(int rows, int cols, double fill = 0.0);
  WeightMatrix(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int r, int c) { return w_[index(r, c)]; }
  double operator()(int r, int c) const { return w_[index(r, c)]; }

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> w_;
};

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (row, col), ascending row
  double total = 0.0;

  /// Column matched to `row`, or -1.
  int col_of(int row) const;
};

/// Maximum-weight matching where any row or column may stay unmatched at
/// weight 0, so negative and forbidden pairs are never selected. Among optimal
/// matchings the one with the lexicographically smallest (row, col) sequence is
/// returned. O(n^3) per solve via the Hungarian method on the (rows + cols)
/// square padding.
Matching max_weight_matching(const WeightMatrix& w);

/// Optimum total only, without the tie-break pass.
double max_weight_total(const WeightMatrix& w);

}  // namespace v2x
