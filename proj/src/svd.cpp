#include "lamforge/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lamforge/errors.hpp"

namespace lamforge {

namespace {

constexpr double kOffDiagTol = 1e-13;
constexpr int kMaxSweeps = 100;

double column_dot(const Matrix& a, int ci, int cj) {
  double s = 0.0;
  for (int row = 0; row < a.dim(); ++row) s += a(row, ci) * a(row, cj);
  return s;
}

void rotate_columns(Matrix& a, int ci, int cj, double c, double s) {
  for (int row = 0; row < a.dim(); ++row) {
    const double vi = a(row, ci);
    const double vj = a(row, cj);
    a(row, ci) = c * vi - s * vj;
    a(row, cj) = s * vi + c * vj;
  }
}

// Orthonormalizes the columns of a by plane rotations, accumulating them in v,
// so that m = a_normalized * sigma * v^T on return.
void one_sided_jacobi(Matrix& a, Matrix& v) {
  const int d = a.dim();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    // Columns reduced to roundoff level keep an O(1) relative correlation with
    // everything else; exempt them or rank-deficient inputs never converge.
    double max_sq = 0.0;
    for (int i = 0; i < d; ++i) max_sq = std::max(max_sq, column_dot(a, i, i));
    const double negligible = 1e-28 * max_sq;
    double off = 0.0;
    for (int i = 0; i < d - 1; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const double alpha = column_dot(a, i, i);
        const double beta = column_dot(a, j, j);
        if (alpha <= negligible || beta <= negligible) continue;
        const double g = column_dot(a, i, j);
        const double scale = std::sqrt(alpha * beta);
        if (scale == 0.0 || std::abs(g) <= kOffDiagTol * scale) continue;
        off = std::max(off, std::abs(g) / scale);
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate_columns(a, i, j, c, s);
        rotate_columns(v, i, j, c, s);
      }
    }
    if (off == 0.0) return;
  }
  // Report the remaining relative off-diagonal mass.
  double residual = 0.0;
  for (int i = 0; i < d - 1; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double scale = std::sqrt(column_dot(a, i, i) * column_dot(a, j, j));
      if (scale > 0.0) residual = std::max(residual, std::abs(column_dot(a, i, j)) / scale);
    }
  }
  throw SvdConvergenceError("Jacobi SVD did not converge after 100 sweeps", residual);
}

double column_norm(const Matrix& a, int col) { return std::sqrt(column_dot(a, col, col)); }

}  // namespace

Matrix SignedSVD::reconstruct() const { return matmul(matmul(p, diag_matrix()), q.transposed()); }

double SignedSVD::tail_product() const {
  double prod = 1.0;
  for (std::size_t i = 2; i < diag.size(); ++i) prod *= std::abs(diag[i]);
  return prod;
}

SignedSVD signed_svd(const Matrix& m) {
  validate(m);
  const int d = m.dim();
  Matrix a = m;
  Matrix v = Matrix::identity(d);
  one_sided_jacobi(a, v);

  std::vector<double> sigma(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) sigma[static_cast<std::size_t>(j)] = column_norm(a, j);
  const double sigma_max = *std::max_element(sigma.begin(), sigma.end());

  // Left factor: normalized columns; near-zero columns are completed to an
  // orthonormal basis from coordinate candidates.
  Matrix u(d);
  std::vector<bool> filled(static_cast<std::size_t>(d), false);
  for (int j = 0; j < d; ++j) {
    if (sigma[static_cast<std::size_t>(j)] > 1e-14 * (1.0 + sigma_max)) {
      for (int row = 0; row < d; ++row) u(row, j) = a(row, j) / sigma[static_cast<std::size_t>(j)];
      filled[static_cast<std::size_t>(j)] = true;
    } else {
      sigma[static_cast<std::size_t>(j)] = 0.0;
    }
  }
  for (int j = 0; j < d; ++j) {
    if (filled[static_cast<std::size_t>(j)]) continue;
    for (int cand = 0; cand < d; ++cand) {
      std::vector<double> col(static_cast<std::size_t>(d), 0.0);
      col[static_cast<std::size_t>(cand)] = 1.0;
      for (int k = 0; k < d; ++k) {
        if (k == j || !filled[static_cast<std::size_t>(k)]) continue;
        double dot = 0.0;
        for (int row = 0; row < d; ++row) dot += col[static_cast<std::size_t>(row)] * u(row, k);
        for (int row = 0; row < d; ++row) col[static_cast<std::size_t>(row)] -= dot * u(row, k);
      }
      double nrm = 0.0;
      for (double x : col) nrm += x * x;
      nrm = std::sqrt(nrm);
      if (nrm > 0.5) {
        for (int row = 0; row < d; ++row) u(row, j) = col[static_cast<std::size_t>(row)] / nrm;
        filled[static_cast<std::size_t>(j)] = true;
        break;
      }
    }
    if (!filled[static_cast<std::size_t>(j)]) {
      throw RuntimeError("failed to complete orthonormal basis in signed_svd");
    }
  }

  // Sort by singular value, ascending; stable to keep ties in original order.
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    return sigma[static_cast<std::size_t>(lhs)] < sigma[static_cast<std::size_t>(rhs)];
  });

  SignedSVD out;
  out.p = Matrix(d);
  out.q = Matrix(d);
  out.diag.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const int src = order[static_cast<std::size_t>(j)];
    out.diag[static_cast<std::size_t>(j)] = sigma[static_cast<std::size_t>(src)];
    for (int row = 0; row < d; ++row) {
      out.p(row, j) = u(row, src);
      out.q(row, j) = v(row, src);
    }
  }

  // Collect any negative orientation into the last diagonal entry so that
  // P and Q are rotations and sign(diag[d-1]) = sign(det m).
  if (determinant(out.p) < 0.0) {
    for (int row = 0; row < d; ++row) out.p(row, d - 1) = -out.p(row, d - 1);
    out.diag[static_cast<std::size_t>(d - 1)] = -out.diag[static_cast<std::size_t>(d - 1)];
  }
  if (determinant(out.q) < 0.0) {
    for (int row = 0; row < d; ++row) out.q(row, d - 1) = -out.q(row, d - 1);
    out.diag[static_cast<std::size_t>(d - 1)] = -out.diag[static_cast<std::size_t>(d - 1)];
  }
  return out;
}

double rank_one_defect(const Matrix& m) {
  const SignedSVD s = signed_svd(m);
  return std::abs(s.diag[s.diag.size() - 2]);
}

}  // namespace lamforge
