#include "v2x/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace v2x {

WeightMatrix::WeightMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  w_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

WeightMatrix::WeightMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) throw std::invalid_argument("ragged matrix");
    w_.insert(w_.end(), r.begin(), r.end());
  }
}

int Matching::col_of(int row) const {
  for (const auto& [r, c] : pairs) {
    if (r == row) return c;
  }
  return -1;
}

namespace {

// Min-cost perfect assignment on an n x n matrix (1-based potentials).
// Returns row_of_col[j] for j in [0, n).
std::vector<int> hungarian_min(const std::vector<double>& cost, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  auto a = [&](int i, int j) {
    return cost[static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n) +
                static_cast<std::size_t>(j - 1)];
  };
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = a(i0, j) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_of_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    row_of_col[static_cast<std::size_t>(j - 1)] = p[static_cast<std::size_t>(j)] - 1;
  }
  return row_of_col;
}

struct SubProblem {
  const WeightMatrix* w;
  std::vector<int> rows;
  std::vector<int> cols;
};

// Optimal partial matching on a row/column subset. Returns the total and,
// if requested, the matched pairs in original indices.
double solve(const SubProblem& sp, std::vector<std::pair<int, int>>* pairs) {
  const int n = static_cast<int>(sp.rows.size());
  const int m = static_cast<int>(sp.cols.size());
  if (n == 0 || m == 0) return 0.0;
  double scale = 1.0;
  for (int r : sp.rows) {
    for (int c : sp.cols) {
      const double x = (*sp.w)(r, c);
      if (std::isfinite(x)) scale += std::abs(x);
    }
  }
  const double big = 4.0 * scale;
  const int size = n + m;
  std::vector<double> cost(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double x = (*sp.w)(sp.rows[static_cast<std::size_t>(i)], sp.cols[static_cast<std::size_t>(j)]);
      cost[static_cast<std::size_t>(i) * static_cast<std::size_t>(size) + static_cast<std::size_t>(j)] =
          std::isfinite(x) ? -x : big;
    }
  }
  const auto row_of_col = hungarian_min(cost, size);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const int i = row_of_col[static_cast<std::size_t>(j)];
    if (i < 0 || i >= n) continue;
    const int r = sp.rows[static_cast<std::size_t>(i)];
    const int c = sp.cols[static_cast<std::size_t>(j)];
    const double x = (*sp.w)(r, c);
    if (!std::isfinite(x) || x < 0.0) continue;  // equivalent to leaving both unmatched
    total += x;
    if (pairs != nullptr) pairs->emplace_back(r, c);
  }
  return total;
}

void check_weights(const WeightMatrix& w) {
  for (int r = 0; r < w.rows(); ++r) {
    for (int c = 0; c < w.cols(); ++c) {
      const double x = w(r, c);
      if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("weight matrix holds NaN or +infinity");
      }
    }
  }
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double max_weight_total(const WeightMatrix& w) {
  check_weights(w);
  SubProblem sp{&w, {}, {}};
  for (int r = 0; r < w.rows(); ++r) sp.rows.push_back(r);
  for (int c = 0; c < w.cols(); ++c) sp.cols.push_back(c);
  return solve(sp, nullptr);
}

Matching max_weight_matching(const WeightMatrix& w) {
  Matching out;
  if (w.empty()) return out;
  check_weights(w);

  SubProblem rest{&w, {}, {}};
  for (int r = 0; r < w.rows(); ++r) rest.rows.push_back(r);
  for (int c = 0; c < w.cols(); ++c) rest.cols.push_back(c);
  std::vector<std::pair<int, int>> current;
  double remaining = solve(rest, &current);

  // Fix rows in order, each to the smallest column that still admits an
  // optimal completion; leaving the row unmatched is tried last. Only columns
  // below the one used by the current optimum need a trial solve.
  for (int r = 0; r < w.rows(); ++r) {
    rest.rows.erase(rest.rows.begin());
    int incumbent = -1;
    for (const auto& [pr, pc] : current) {
      if (pr == r) incumbent = pc;
    }
    bool fixed = false;
    for (std::size_t k = 0; k < rest.cols.size() && !fixed; ++k) {
      const int c = rest.cols[k];
      const double x = w(r, c);
      if (!std::isfinite(x) || x < 0.0) continue;
      SubProblem trial{&w, rest.rows, rest.cols};
      trial.cols.erase(trial.cols.begin() + static_cast<std::ptrdiff_t>(k));
      if (c == incumbent) {
        std::erase_if(current, [r](const auto& pc) { return pc.first == r; });
        remaining -= x;
      } else {
        std::vector<std::pair<int, int>> tail_pairs;
        const double tail = solve(trial, &tail_pairs);
        if (!close(x + tail, remaining)) continue;
        current = std::move(tail_pairs);
        remaining = tail;
      }
      out.pairs.emplace_back(r, c);
      out.total += x;
      rest.cols = std::move(trial.cols);
      fixed = true;
    }
  }
  return out;
}

}  // namespace v2x
