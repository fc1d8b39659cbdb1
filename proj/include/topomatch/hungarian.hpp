#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace topomatch {

// Dense row-major matrix of reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using Assignment = std::vector<std::pair<std::size_t, std::size_t>>;

// Minimum-cost assignment of min(n, m) pairs (Kuhn-Munkres with potentials,
// O(n^2 m)). Pairs are returned sorted by row. Ties resolve towards smaller
// column indices. An empty matrix gives an empty assignment. Throws
// InputError on non-finite entries.
Assignment hungarian_assign(const Matrix& cost);

double assignment_cost(const Matrix& cost, const Assignment& assignment);

}  // namespace topomatch
