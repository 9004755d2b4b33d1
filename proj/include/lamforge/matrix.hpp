#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace lamforge {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 8;

/// Dense d x d matrix, d in [2,8], row-major storage.
class Matrix {
 public:
  Matrix() : dim_(kMinDim) { e_.fill(0.0); }
  explicit Matrix(int dim);
  Matrix(int dim, std::initializer_list<double> entries);
  Matrix(int dim, std::span<const double> entries);

  static Matrix identity(int dim);
  static Matrix zero(int dim) { return Matrix(dim); }
  static Matrix diagonal(std::span<const double> d);
  /// Rank-one matrix a b^T.
  static Matrix outer(std::span<const double> a, std::span<const double> b);

  int dim() const noexcept { return dim_; }
  double& operator()(int i, int j) noexcept { return e_[static_cast<std::size_t>(i) * dim_ + j]; }
  double operator()(int i, int j) const noexcept {
    return e_[static_cast<std::size_t>(i) * dim_ + j];
  }
  std::span<const double> entries() const noexcept {
    return {e_.data(), static_cast<std::size_t>(dim_) * dim_};
  }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  Matrix transposed() const;
  bool all_finite() const noexcept;

 private:
  int dim_;
  std::array<double, static_cast<std::size_t>(kMaxDim) * kMaxDim> e_;
};

Matrix matmul(const Matrix& a, const Matrix& b);

/// det M via LU with partial pivoting; exact (up to rounding) for triangular input.
double determinant(const Matrix& m);

double frobenius_norm(const Matrix& m);

double frobenius_distance(const Matrix& a, const Matrix& b);

/// Solve A x = b for a small square system. Throws RuntimeError on a singular pivot.
std::vector<double> solve_linear(const Matrix& a, std::span<const double> b);

/// Checks dim and finiteness; throws ValidationError otherwise.
void validate(const Matrix& m);

}  // namespace lamforge
