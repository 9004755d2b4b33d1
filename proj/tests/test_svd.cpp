#include "lamforge/svd.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "lamforge/errors.hpp"
#include "test_util.hpp"

using namespace lamforge;
using lamforge::testing::random_matrix;
using lamforge::testing::random_rotation;

namespace {

void check_invariants(const Matrix& m, const SignedSVD& s) {
  const int d = m.dim();
  // Orthogonality and orientation.
  const Matrix ptp = matmul(s.p.transposed(), s.p);
  const Matrix qtq = matmul(s.q.transposed(), s.q);
  CHECK(frobenius_distance(ptp, Matrix::identity(d)) <= 1e-12 * d);
  CHECK(frobenius_distance(qtq, Matrix::identity(d)) <= 1e-12 * d);
  CHECK(determinant(s.p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(determinant(s.q) == doctest::Approx(1.0).epsilon(1e-12));
  // Modulus ordering, only last entry possibly negative.
  for (int i = 0; i + 1 < d; ++i) {
    CHECK(s.diag[static_cast<std::size_t>(i)] >= 0.0);
    CHECK(std::abs(s.diag[static_cast<std::size_t>(i)]) <=
          std::abs(s.diag[static_cast<std::size_t>(i + 1)]) + 1e-13);
  }
  // Reconstruction.
  CHECK(frobenius_distance(s.reconstruct(), m) <= 1e-10 * (1.0 + frobenius_norm(m)));
  // Determinant consistency.
  double prod = 1.0;
  for (double v : s.diag) prod *= v;
  const double det = determinant(m);
  CHECK(std::abs(det - prod) <= 1e-9 * (1.0 + std::pow(frobenius_norm(m), d)));
  if (std::abs(det) > 1e-12) {
    CHECK(std::signbit(s.diag[static_cast<std::size_t>(d - 1)]) == std::signbit(det));
  }
  // Norm consistency.
  double sq = 0.0;
  for (double v : s.diag) sq += v * v;
  const double nrm2 = frobenius_norm(m) * frobenius_norm(m);
  CHECK(std::abs(sq - nrm2) <= 1e-9 * (1.0 + nrm2));
}

}  // namespace

TEST_CASE("signed svd of identity") {
  const SignedSVD s = signed_svd(Matrix::identity(3));
  CHECK(frobenius_distance(s.p, Matrix::identity(3)) <= 1e-12);
  CHECK(frobenius_distance(s.q, Matrix::identity(3)) <= 1e-12);
  for (double v : s.diag) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("signed svd of a 2x2 swap carries the negative determinant") {
  const Matrix m(2, {0.0, 1.0, 1.0, 0.0});
  const SignedSVD s = signed_svd(m);
  CHECK(s.diag[0] == doctest::Approx(1.0));
  CHECK(s.diag[1] == doctest::Approx(-1.0));
  CHECK(frobenius_distance(s.reconstruct(), m) <= 1e-12);
  check_invariants(m, s);
}

TEST_CASE("signed svd of a rotation keeps unit diagonal") {
  std::mt19937_64 rng(42);
  for (int d : {2, 3, 4}) {
    const Matrix r = random_rotation(rng, d);
    const SignedSVD s = signed_svd(r);
    for (double v : s.diag) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    check_invariants(r, s);
  }
}

TEST_CASE("signed svd of the zero matrix") {
  const SignedSVD s = signed_svd(Matrix::zero(4));
  CHECK(frobenius_distance(s.p, Matrix::identity(4)) <= 1e-12);
  CHECK(frobenius_distance(s.q, Matrix::identity(4)) <= 1e-12);
  for (double v : s.diag) CHECK(v == 0.0);
}

TEST_CASE("signed svd invariants on random matrices") {
  std::mt19937_64 rng(2024);
  for (int d = 2; d <= 8; ++d) {
    for (int trial = 0; trial < 60; ++trial) {
      const Matrix m = random_matrix(rng, d);
      check_invariants(m, signed_svd(m));
    }
  }
}

TEST_CASE("signed svd of rank-deficient matrices") {
  std::mt19937_64 rng(5);
  const double a[] = {1.0, -0.5, 2.0};
  const double b[] = {0.25, 3.0, -1.0};
  const Matrix m = Matrix::outer(a, b);
  check_invariants(m, signed_svd(m));
}

TEST_CASE("rank_one_defect") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int d : {2, 3, 5}) {
    std::vector<double> a(static_cast<std::size_t>(d)), b(static_cast<std::size_t>(d));
    for (auto& x : a) x = dist(rng);
    for (auto& x : b) x = dist(rng);
    CHECK(rank_one_defect(Matrix::outer(a, b)) <= 1e-12);
  }
  CHECK(rank_one_defect(Matrix::identity(2)) == doctest::Approx(1.0));
  Matrix shear = Matrix::zero(3);
  shear(0, 1) = 1.7;
  CHECK(rank_one_defect(shear) <= 1e-12);
}
