#pragma once

#include <vector>

#include "lamforge/matrix.hpp"

namespace lamforge {

/// Decomposition M = P diag Q^T with P, Q special-orthogonal and the determinant
/// sign carried by the last diagonal entry. Diagonal is sorted by modulus, ascending.
struct SignedSVD {
  Matrix p;
  Matrix q;
  std::vector<double> diag;

  Matrix diag_matrix() const { return Matrix::diagonal(diag); }
  Matrix reconstruct() const;
  /// Product |diag[2]| ... |diag[d-1]|; empty product (d = 2) is 1.
  double tail_product() const;
};

/// One-sided Jacobi SVD with the sign convention of the laminate construction:
/// P, Q rotations, any negative orientation collected into the last diagonal entry.
SignedSVD signed_svd(const Matrix& m);

/// Second-largest singular value of m; zero (to rounding) iff rank(m) <= 1.
double rank_one_defect(const Matrix& m);

}  // namespace lamforge
