#include "zscreen/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zscreen {

Matrix Matrix::without_row(std::size_t r) const {
  Matrix out(rows_ - 1, cols_);
  for (std::size_t i = 0, k = 0; i < rows_; ++i) {
    if (i == r) continue;
    for (std::size_t j = 0; j < cols_; ++j) out(k, j) = (*this)(i, j);
    ++k;
  }
  return out;
}

namespace {

double max_column_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, j) * a(i, j);
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

// In-place elimination on [A | B]; B has `rhs` columns stored in `b`.
bool eliminate(Matrix& a, Matrix& b) {
  const std::size_t n = a.rows();
  const double threshold = 1e-12 * max_column_norm(a);
  if (threshold == 0.0) return false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
    }
    if (std::abs(a(pivot, k)) < threshold) return false;
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pivot, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(pivot, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * b(j, c);
      b(ii, c) = s / a(ii, ii);
    }
  }
  return true;
}

}  // namespace

std::optional<std::vector<double>> solve(Matrix a, std::vector<double> b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw std::invalid_argument("solve: shape mismatch");
  Matrix rhs(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
  if (!eliminate(a, rhs)) return std::nullopt;
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = rhs(i, 0);
  return b;
}

std::optional<Matrix> inverse(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix not square");
  Matrix work = a;
  Matrix id(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) id(i, i) = 1.0;
  if (!eliminate(work, id)) return std::nullopt;
  return id;
}

}  // namespace zscreen
