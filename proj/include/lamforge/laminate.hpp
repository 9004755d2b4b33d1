#pragma once

#include <optional>
#include <vector>

#include "lamforge/constraint.hpp"
#include "lamforge/dyadic.hpp"
#include "lamforge/matrix.hpp"
#include "lamforge/svd.hpp"

namespace lamforge {

enum class CaseTag { kCaseOne, kCaseTwo };
enum class AtomRole { kGood, kBad, kContinue };

struct SplitChild {
  Dyadic weight;
  Matrix matrix;
  AtomRole role;
};

/// One rank-one splitting of a parent matrix. Case one: four children at
/// weight 1/4 along the two shear directions, magnitude gamma. Case two: two
/// children at weight 1/2 perturbing the third diagonal entry, magnitude delta.
struct SplitStep {
  Matrix parent;
  CaseTag case_tag;
  double magnitude = 0.0;
  /// Case-one levels completed above this split (realization frequency level).
  int depth = 0;
  std::vector<SplitChild> children;
};

struct Atom {
  Dyadic weight;
  Matrix matrix;
  AtomRole role;
};

/// Finite atomic probability measure on matrices with split provenance.
struct DiscreteLaminate {
  Matrix root;
  double rate = 0.0;
  int case_one_depth = 0;
  std::vector<Atom> atoms;
  std::vector<SplitStep> tree;

  bool is_dirac() const noexcept { return atoms.size() == 1; }
  Dyadic bad_mass() const;
  Matrix barycenter() const;
};

/// Case selection: case one iff the tail product |diag[2]| ... |diag[d-1]| is at
/// least min((|r|/2), (|r - det|/2))^((d-2)/d); equality classifies as case one.
/// The second branch keeps gamma <= C |r - det|^(1/d) wherever the first would,
/// so every fixed-rate estimate carries over. For d = 2 the product is empty and
/// case one always fires.
CaseTag classify_case(const SignedSVD& s, double rate);

/// Largest rank-one defect over the elementary moves of the step. Case one is
/// two nested binary splits, so each child is reached through a midpoint and
/// both legs are certified; case two children are checked against the parent.
double split_rank_one_defect(const SplitStep& step);

/// Splits the diagonal form of s into the four matrices D +- gamma e12 +- gamma e21,
/// labeling good/bad by direct determinant evaluation. gamma = 0 labels all four good.
SplitStep split_case_one(const SignedSVD& s, double rate);

/// Splits the diagonal form of s into D +- delta e33, both children to be continued.
SplitStep split_case_two(const SignedSVD& s, double rate);

/// Conjugates every matrix of a step: X -> P X Q^T.
SplitStep conjugate(const SplitStep& step, const Matrix& p, const Matrix& q);

struct BuildOptions {
  /// When set, the depth is the minimal k with 2^-k <= bad_mass_tol.
  std::optional<double> bad_mass_tol;
};

/// Recursive laminate of Jacobian rate `rate` around m with k case-one levels.
DiscreteLaminate build_laminate(const Matrix& m, double rate, int k, const BuildOptions& opts = {});

/// Clamp of t to [j1, j2]; infinities denote one-sided constraints.
double clamp_rate(double t, double j1, double j2);

/// Laminate whose support satisfies the pointwise constraint: the rate is the
/// clamped determinant, so an already-admissible m yields the Dirac measure.
DiscreteLaminate laminate_for_constraint(const Matrix& m, const PointwiseConstraint& constraint,
                                         int k, const BuildOptions& opts = {});

}  // namespace lamforge
