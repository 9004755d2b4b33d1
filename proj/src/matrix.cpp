#include "lamforge/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "lamforge/errors.hpp"

namespace lamforge {

namespace {

void check_dim(int dim) {
  if (dim < kMinDim || dim > kMaxDim) {
    throw ValidationError("matrix dimension " + std::to_string(dim) + " outside [" +
                          std::to_string(kMinDim) + "," + std::to_string(kMaxDim) + "]");
  }
}

}  // namespace

Matrix::Matrix(int dim) : dim_(dim) {
  check_dim(dim);
  e_.fill(0.0);
}

Matrix::Matrix(int dim, std::initializer_list<double> entries)
    : Matrix(dim, std::span<const double>(entries.begin(), entries.size())) {}

Matrix::Matrix(int dim, std::span<const double> entries) : dim_(dim) {
  check_dim(dim);
  if (entries.size() != static_cast<std::size_t>(dim) * dim) {
    throw ValidationError("entry count does not match matrix dimension");
  }
  e_.fill(0.0);
  for (std::size_t i = 0; i < entries.size(); ++i) e_[i] = entries[i];
}

Matrix Matrix::identity(int dim) {
  Matrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.dim(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

Matrix Matrix::outer(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("outer product with mismatched vector sizes");
  Matrix m(static_cast<int>(a.size()));
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j)
      m(i, j) = a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
  return m;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (other.dim_ != dim_) throw ValidationError("dimension mismatch in matrix addition");
  for (std::size_t i = 0; i < static_cast<std::size_t>(dim_) * dim_; ++i) e_[i] += other.e_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (other.dim_ != dim_) throw ValidationError("dimension mismatch in matrix subtraction");
  for (std::size_t i = 0; i < static_cast<std::size_t>(dim_) * dim_; ++i) e_[i] -= other.e_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (std::size_t i = 0; i < static_cast<std::size_t>(dim_) * dim_; ++i) e_[i] *= s;
  return *this;
}

Matrix Matrix::transposed() const {
  Matrix t(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const noexcept {
  for (std::size_t i = 0; i < static_cast<std::size_t>(dim_) * dim_; ++i)
    if (!std::isfinite(e_[i])) return false;
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch in matmul");
  const int d = a.dim();
  Matrix c(d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double determinant(const Matrix& m) {
  const int d = m.dim();
  Matrix lu = m;
  double det = 1.0;
  for (int col = 0; col < d; ++col) {
    int pivot = col;
    double best = std::abs(lu(col, col));
    for (int row = col + 1; row < d; ++row) {
      if (std::abs(lu(row, col)) > best) {
        best = std::abs(lu(row, col));
        pivot = row;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      for (int j = 0; j < d; ++j) std::swap(lu(col, j), lu(pivot, j));
      det = -det;
    }
    det *= lu(col, col);
    for (int row = col + 1; row < d; ++row) {
      const double f = lu(row, col) / lu(col, col);
      if (f == 0.0) continue;
      for (int j = col; j < d; ++j) lu(row, j) -= f * lu(col, j);
    }
  }
  return det;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double v : m.entries()) s += v * v;
  return std::sqrt(s);
}

double frobenius_distance(const Matrix& a, const Matrix& b) { return frobenius_norm(a - b); }

std::vector<double> solve_linear(const Matrix& a, std::span<const double> b) {
  const int d = a.dim();
  if (b.size() != static_cast<std::size_t>(d)) {
    throw ValidationError("rhs size does not match matrix dimension");
  }
  Matrix lu = a;
  std::vector<double> x(b.begin(), b.end());
  for (int col = 0; col < d; ++col) {
    int pivot = col;
    double best = std::abs(lu(col, col));
    for (int row = col + 1; row < d; ++row) {
      if (std::abs(lu(row, col)) > best) {
        best = std::abs(lu(row, col));
        pivot = row;
      }
    }
    if (best == 0.0) throw RuntimeError("singular system in solve_linear");
    if (pivot != col) {
      for (int j = 0; j < d; ++j) std::swap(lu(col, j), lu(pivot, j));
      std::swap(x[static_cast<std::size_t>(col)], x[static_cast<std::size_t>(pivot)]);
    }
    for (int row = col + 1; row < d; ++row) {
      const double f = lu(row, col) / lu(col, col);
      if (f == 0.0) continue;
      for (int j = col; j < d; ++j) lu(row, j) -= f * lu(col, j);
      x[static_cast<std::size_t>(row)] -= f * x[static_cast<std::size_t>(col)];
    }
  }
  for (int row = d - 1; row >= 0; --row) {
    double s = x[static_cast<std::size_t>(row)];
    for (int j = row + 1; j < d; ++j) s -= lu(row, j) * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(row)] = s / lu(row, row);
  }
  return x;
}

void validate(const Matrix& m) {
  check_dim(m.dim());
  if (!m.all_finite()) throw ValidationError("matrix has non-finite entries");
}

}  // namespace lamforge
