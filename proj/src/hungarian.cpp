#include "topomatch/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topomatch/error.hpp"

namespace topomatch {

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

namespace {

// Shortest augmenting path with row/column potentials. Requires rows <= cols.
// Index 0 of the potential arrays is the virtual source column.
Assignment solve_rows_le_cols(const Matrix& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> row_of(m + 1, 0), way(m + 1, 0);
  std::vector<double> min_slack(m + 1);
  std::vector<char> used(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < min_slack[j]) {
          min_slack[j] = reduced;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.reserve(n);
  for (std::size_t j = 1; j <= m; ++j) {
    if (row_of[j] != 0) out.emplace_back(row_of[j] - 1, j - 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Assignment hungarian_assign(const Matrix& cost) {
  if (cost.empty()) return {};
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    for (std::size_t c = 0; c < cost.cols(); ++c) {
      if (!std::isfinite(cost(r, c))) throw InputError("cost matrix has a non-finite entry");
    }
  }
  if (cost.rows() <= cost.cols()) return solve_rows_le_cols(cost);

  Assignment swapped = solve_rows_le_cols(cost.transposed());
  for (auto& [r, c] : swapped) std::swap(r, c);
  std::sort(swapped.begin(), swapped.end());
  return swapped;
}

double assignment_cost(const Matrix& cost, const Assignment& assignment) {
  double total = 0.0;
  for (const auto& [r, c] : assignment) total += cost(r, c);
  return total;
}

}  // namespace topomatch
