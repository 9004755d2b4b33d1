#include "lamforge/laminate.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "lamforge/errors.hpp"
#include "test_util.hpp"

using namespace lamforge;
using lamforge::testing::random_matrix;
using lamforge::testing::random_rotation;

TEST_CASE("classify_case thresholds") {
  const double one3[] = {1.0, 1.0, 1.0};
  CHECK(classify_case(signed_svd(Matrix::diagonal(one3)), 2.0) == CaseTag::kCaseOne);
  const double small3[] = {0.1, 0.1, 0.1};
  CHECK(classify_case(signed_svd(Matrix::diagonal(small3)), 2.0) == CaseTag::kCaseTwo);
  CHECK(classify_case(signed_svd(Matrix::identity(4)), 2.0) == CaseTag::kCaseOne);
  // d = 2: the tail product is empty, case one always fires.
  const double tiny2[] = {1e-3, 1e-3};
  CHECK(classify_case(signed_svd(Matrix::diagonal(tiny2)), 100.0) == CaseTag::kCaseOne);
}

TEST_CASE("split_case_one at the identity, d=3, r=3") {
  const SignedSVD s = signed_svd(Matrix::identity(3));
  const SplitStep step = split_case_one(s, 3.0);
  CHECK(step.magnitude == doctest::Approx(std::sqrt(2.0)));
  CHECK(split_rank_one_defect(step) <= 1e-10);
  int goods = 0;
  int bads = 0;
  for (const SplitChild& c : step.children) {
    CHECK(c.weight == Dyadic::pow2(2));
    const double det = determinant(c.matrix);
    if (c.role == AtomRole::kGood) {
      ++goods;
      CHECK(det == doctest::Approx(3.0));
    } else {
      ++bads;
      CHECK(det == doctest::Approx(-1.0));
    }
  }
  CHECK(goods == 2);
  CHECK(bads == 2);
}

TEST_CASE("split_case_one fixed point r = det M") {
  const SignedSVD s = signed_svd(Matrix::identity(3));
  const SplitStep step = split_case_one(s, 1.0);
  CHECK(step.magnitude == 0.0);
  for (const SplitChild& c : step.children) {
    CHECK(c.role == AtomRole::kGood);
    CHECK(frobenius_distance(c.matrix, Matrix::identity(3)) == 0.0);
  }
}

TEST_CASE("split_case_one d=4 identity, r=2") {
  const SignedSVD s = signed_svd(Matrix::identity(4));
  const SplitStep step = split_case_one(s, 2.0);
  CHECK(step.magnitude == doctest::Approx(1.0));
  for (const SplitChild& c : step.children) {
    const double det = determinant(c.matrix);
    if (c.role == AtomRole::kGood) {
      CHECK(det == doctest::Approx(2.0));
    } else {
      CHECK(det == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("split_case_two perturbs the third diagonal entry") {
  const double small3[] = {0.1, 0.1, 0.1};
  const SignedSVD s = signed_svd(Matrix::diagonal(small3));
  const SplitStep step = split_case_two(s, 2.0);
  CHECK(step.magnitude == doctest::Approx(2.0));
  CHECK(step.children.size() == 2);
  CHECK(step.children[0].matrix(2, 2) == doctest::Approx(2.1));
  CHECK(step.children[1].matrix(2, 2) == doctest::Approx(-1.9));
  Matrix avg = 0.5 * step.children[0].matrix + 0.5 * step.children[1].matrix;
  CHECK(frobenius_distance(avg, step.parent) <= 1e-12 * (1.0 + frobenius_norm(step.parent)));
  // Both new entries have modulus at least (|r|/2)^(1/3) = 1.
  for (const SplitChild& c : step.children) {
    CHECK(std::abs(c.matrix(2, 2)) >= 1.0 - 1e-12);
    CHECK(c.role == AtomRole::kContinue);
  }
}

TEST_CASE("build_laminate Dirac fixed point") {
  std::mt19937_64 rng(3);
  const Matrix m = random_matrix(rng, 3);
  const DiscreteLaminate nu = build_laminate(m, determinant(m), 5);
  CHECK(nu.is_dirac());
  CHECK(nu.atoms[0].role == AtomRole::kGood);
  CHECK(nu.atoms[0].weight.is_one());
  CHECK(nu.bad_mass() == Dyadic::zero());
}

TEST_CASE("build_laminate identity d=3 r=3 depth 1") {
  const DiscreteLaminate nu = build_laminate(Matrix::identity(3), 3.0, 1);
  CHECK(nu.atoms.size() == 4);
  int goods = 0;
  for (const Atom& a : nu.atoms) {
    if (a.role == AtomRole::kGood) {
      ++goods;
      CHECK(determinant(a.matrix) == doctest::Approx(3.0));
    } else {
      CHECK(determinant(a.matrix) == doctest::Approx(-1.0));
    }
  }
  CHECK(goods == 2);
  CHECK(nu.bad_mass() == Dyadic::pow2(1));
}

TEST_CASE("bad mass law 2^-k") {
  const DiscreteLaminate nu = build_laminate(Matrix::identity(3), 3.0, 4);
  CHECK(nu.bad_mass() == Dyadic::pow2(4));
  // Weights sum to exactly one.
  Dyadic total;
  for (const Atom& a : nu.atoms) total = total + a.weight;
  CHECK(total.is_one());
}

TEST_CASE("laminate invariants over random instances") {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> rate_dist(-5.0, 5.0);
  std::uniform_int_distribution<int> dim_dist(2, 5);
  std::uniform_int_distribution<int> depth_dist(0, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = dim_dist(rng);
    const Matrix m = random_matrix(rng, d);
    const double r = rate_dist(rng);
    const int k = depth_dist(rng);
    const DiscreteLaminate nu = build_laminate(m, r, k);

    Dyadic total;
    for (const Atom& a : nu.atoms) total = total + a.weight;
    CHECK(total.is_one());

    CHECK(frobenius_distance(nu.barycenter(), m) <= 1e-9 * (1.0 + frobenius_norm(m)));

    for (const Atom& a : nu.atoms) {
      if (a.role == AtomRole::kGood) {
        CHECK(std::abs(determinant(a.matrix) - r) <= 1e-8 * (1.0 + std::abs(r)));
      }
    }
    if (!nu.is_dirac()) CHECK(nu.bad_mass() == Dyadic::pow2(static_cast<unsigned>(k)));

    // Determinant is affine along rank-one splits, so it averages exactly.
    double det_avg = 0.0;
    for (const Atom& a : nu.atoms) det_avg += a.weight.to_double() * determinant(a.matrix);
    CHECK(std::abs(det_avg - determinant(m)) <= 1e-8 * (1.0 + std::abs(determinant(m))));

    for (const SplitStep& step : nu.tree) {
      CHECK(split_rank_one_defect(step) <= 1e-10 * (1.0 + frobenius_norm(step.parent)));
      Matrix avg(m.dim());
      for (const SplitChild& c : step.children) {
        avg += (1.0 / static_cast<double>(step.children.size())) * c.matrix;
      }
      CHECK(frobenius_distance(avg, step.parent) <= 1e-10 * (1.0 + frobenius_norm(step.parent)));
    }
  }
}

TEST_CASE("conjugation covariance") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix m = random_matrix(rng, 3);
    const Matrix p = random_rotation(rng, 3);
    const Matrix q = random_rotation(rng, 3);
    const double r = 2.5;
    const DiscreteLaminate base = build_laminate(m, r, 3);
    const DiscreteLaminate conj = build_laminate(matmul(matmul(p, m), q.transposed()), r, 3);
    REQUIRE(base.atoms.size() == conj.atoms.size());
    // The diagonal frame is only unique up to column signs and ties, so the two
    // builds may order atoms differently; match them as a multiset.
    std::vector<bool> used(conj.atoms.size(), false);
    for (const Atom& a : base.atoms) {
      const Matrix expected = matmul(matmul(p, a.matrix), q.transposed());
      bool matched = false;
      for (std::size_t j = 0; j < conj.atoms.size(); ++j) {
        if (used[j] || !(conj.atoms[j].weight == a.weight)) continue;
        if (frobenius_distance(conj.atoms[j].matrix, expected) <=
            1e-8 * (1.0 + frobenius_norm(expected))) {
          used[j] = true;
          matched = true;
          break;
        }
      }
      CHECK(matched);
    }
  }
}

TEST_CASE("clamp_rate") {
  CHECK(clamp_rate(5.0, 1.0, 2.0) == 2.0);
  CHECK(clamp_rate(1.5, 1.0, 2.0) == 1.5);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(clamp_rate(3.0, -inf, 0.0) == 0.0);
  CHECK_THROWS_AS(clamp_rate(0.0, 2.0, 1.0), ValidationError);
}

TEST_CASE("laminate_for_constraint") {
  std::mt19937_64 rng(8);
  const Matrix m = random_matrix(rng, 3);
  const double det = determinant(m);

  // Interval containing det gives the Dirac measure.
  PointwiseConstraint containing{ConstraintKind::kInterval, 0.0, det - 1.0, det + 1.0};
  CHECK(laminate_for_constraint(m, containing, 3).is_dirac());

  // det 5 clamped into [1,2] at depth 3.
  const double diag5[] = {1.0, 1.0, 5.0};
  const Matrix m5 = Matrix::diagonal(diag5);
  PointwiseConstraint band{ConstraintKind::kInterval, 0.0, 1.0, 2.0};
  const DiscreteLaminate nu = laminate_for_constraint(m5, band, 3);
  CHECK(nu.rate == doctest::Approx(2.0));
  CHECK(nu.bad_mass() == Dyadic::pow2(3));

  // One-sided J2 = +inf behaves like Exact(r) below and Dirac above.
  const double inf = std::numeric_limits<double>::infinity();
  PointwiseConstraint lower{ConstraintKind::kInterval, 0.0, det + 1.0, inf};
  const DiscreteLaminate pushed = laminate_for_constraint(m, lower, 2);
  CHECK(pushed.rate == doctest::Approx(det + 1.0));
  PointwiseConstraint loose{ConstraintKind::kInterval, 0.0, det - 1.0, inf};
  CHECK(laminate_for_constraint(m, loose, 2).is_dirac());
}

TEST_CASE("depth guard") {
  CHECK_THROWS_AS(build_laminate(Matrix::identity(3), 2.0, 61), ValidationError);
  CHECK_THROWS_AS(build_laminate(Matrix::identity(3), 2.0, -1), ValidationError);
}

TEST_CASE("bad mass tolerance picks minimal depth") {
  BuildOptions opts;
  opts.bad_mass_tol = 0.05;  // 2^-5 = 0.03125 <= 0.05 < 2^-4
  const DiscreteLaminate nu = build_laminate(Matrix::identity(3), 3.0, 0, opts);
  CHECK(nu.case_one_depth == 5);
  CHECK(nu.bad_mass() == Dyadic::pow2(5));
}
