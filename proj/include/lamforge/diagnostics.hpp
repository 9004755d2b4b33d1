#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lamforge/constraint.hpp"
#include "lamforge/laminate.hpp"

namespace lamforge {

struct TightnessReport {
  double ratio = 0.0;
  /// Set when the constraint is already satisfied but the measure is not Dirac.
  bool violation = false;
};

struct SupportReport {
  double good_residual = 0.0;
  Dyadic off_support_mass;
};

enum class TestFunctionTag { kConvex, kMinorAffine };

struct TestFunction {
  std::string name;
  std::function<double(const Matrix&)> eval;
  TestFunctionTag tag;
};

using TestFunctionFamily = std::vector<TestFunction>;

struct JensenViolation {
  std::string name;
  double lhs = 0.0;  // h(barycenter)
  double rhs = 0.0;  // <h, nu>
};

struct JensenReport {
  std::vector<JensenViolation> violations;
  double worst_minor_gap = 0.0;
  bool ok() const noexcept { return violations.empty(); }
};

struct LaminateDiagnostics {
  double barycenter_err = 0.0;
  double moment_p = 0.0;
  double tightness_ratio = 0.0;
  double support_residual = 0.0;
  Dyadic bad_mass;
  double minors_gap = 0.0;
  int depth = 0;
};

Matrix barycenter(const DiscreteLaminate& nu);

/// Sum of w_i |A_i - m|_F^p; requires p >= 1.
double moment_p(const DiscreteLaminate& nu, const Matrix& m, double p);

/// moment_p / max{R(m), 0}^(p/d). Zero in the guarded Dirac case; a satisfied
/// constraint with nonzero moment flags a violation (should have been Dirac).
TightnessReport tightness_ratio(const DiscreteLaminate& nu, const Matrix& m,
                                const PointwiseConstraint& constraint, double p);

/// good_residual: worst constraint value over good atoms. off_support_mass:
/// weight carried by atoms with constraint value above 1e-8 * (1 + |r|).
SupportReport support_residual(const DiscreteLaminate& nu, const PointwiseConstraint& constraint);

/// Worst gap, over all k x k minors (1 <= k <= d), between the minor averaged
/// against nu and the minor of the barycenter, normalized by 1 + |minor|.
double minors_consistency(const DiscreteLaminate& nu);

/// Convex members must satisfy h(barycenter) <= <h, nu> + 1e-9 * scale;
/// minor-affine members must match to the same tolerance on both sides.
JensenReport jensen_convex_check(const DiscreteLaminate& nu, const TestFunctionFamily& family);

/// Frobenius-power and determinant test functions plus coordinate functionals.
TestFunctionFamily standard_test_family(int dim, double p);

LaminateDiagnostics diagnose(const DiscreteLaminate& nu, const PointwiseConstraint& constraint,
                             double p);

/// CSV with header dim,p,rate,depth,barycenter_err,moment_p,tightness_ratio,bad_mass,minors_gap.
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(int dim, double p, double rate, const LaminateDiagnostics& diag);

}  // namespace lamforge
