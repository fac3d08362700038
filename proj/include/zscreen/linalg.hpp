#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace zscreen {

// Dense row-major matrix, sized for the handful of columns the models use.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix without_row(std::size_t r) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Solves A x = b for square A by Gaussian elimination with partial pivoting.
// Returns nullopt when a pivot falls below 1e-12 times the largest column norm.
std::optional<std::vector<double>> solve(Matrix a, std::vector<double> b);

// Inverse of a square matrix, same singularity rule as solve().
std::optional<Matrix> inverse(const Matrix& a);

}  // namespace zscreen
