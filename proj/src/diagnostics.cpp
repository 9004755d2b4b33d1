#include "lamforge/diagnostics.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "lamforge/errors.hpp"

namespace lamforge {

namespace {

// Minor selected by row/column bitmasks of equal popcount.
double minor_value(const Matrix& m, unsigned rows, unsigned cols) {
  int ri[8];
  int ci[8];
  int k = 0;
  for (int i = 0; i < m.dim(); ++i)
    if (rows & (1u << i)) ri[k++] = i;
  int kc = 0;
  for (int j = 0; j < m.dim(); ++j)
    if (cols & (1u << j)) ci[kc++] = j;
  if (k == 1) return m(ri[0], ci[0]);
  Matrix sub(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = m(ri[i], ci[j]);
  return determinant(sub);
}

}  // namespace

Matrix barycenter(const DiscreteLaminate& nu) { return nu.barycenter(); }

double moment_p(const DiscreteLaminate& nu, const Matrix& m, double p) {
  if (!(p >= 1.0)) throw ValidationError("moment_p requires p >= 1");
  double sum = 0.0;
  for (const Atom& a : nu.atoms) {
    sum += a.weight.to_double() * std::pow(frobenius_distance(a.matrix, m), p);
  }
  return sum;
}

TightnessReport tightness_ratio(const DiscreteLaminate& nu, const Matrix& m,
                                const PointwiseConstraint& constraint, double p) {
  TightnessReport report;
  const double r_value = constraint.value(determinant(m));
  const double moment = moment_p(nu, m, p);
  if (r_value <= 0.0) {
    if (moment <= 1e-12) return report;  // guarded Dirac case, ratio 0
    report.violation = true;
    return report;
  }
  report.ratio = moment / std::pow(r_value, p / static_cast<double>(m.dim()));
  return report;
}

SupportReport support_residual(const DiscreteLaminate& nu, const PointwiseConstraint& constraint) {
  SupportReport report;
  const double tol = 1e-8 * (1.0 + std::abs(constraint.target_rate(determinant(nu.root))));
  for (const Atom& a : nu.atoms) {
    const double value = constraint.value(determinant(a.matrix));
    if (a.role == AtomRole::kGood) report.good_residual = std::max(report.good_residual, value);
    if (value > tol) report.off_support_mass = report.off_support_mass + a.weight;
  }
  return report;
}

double minors_consistency(const DiscreteLaminate& nu) {
  const int d = nu.root.dim();
  const Matrix bary = nu.barycenter();
  double worst = 0.0;
  const unsigned top = 1u << d;
  for (unsigned rows = 1; rows < top; ++rows) {
    const int k = std::popcount(rows);
    for (unsigned cols = 1; cols < top; ++cols) {
      if (std::popcount(cols) != k) continue;
      double avg = 0.0;
      for (const Atom& a : nu.atoms) avg += a.weight.to_double() * minor_value(a.matrix, rows, cols);
      const double ref = minor_value(bary, rows, cols);
      worst = std::max(worst, std::abs(avg - ref) / (1.0 + std::abs(ref)));
    }
  }
  return worst;
}

JensenReport jensen_convex_check(const DiscreteLaminate& nu, const TestFunctionFamily& family) {
  JensenReport report;
  const Matrix bary = nu.barycenter();
  for (const TestFunction& h : family) {
    const double lhs = h.eval(bary);
    double rhs = 0.0;
    for (const Atom& a : nu.atoms) rhs += a.weight.to_double() * h.eval(a.matrix);
    const double scale = 1.0 + std::abs(lhs) + std::abs(rhs);
    const bool bad = h.tag == TestFunctionTag::kConvex ? lhs > rhs + 1e-9 * scale
                                                       : std::abs(lhs - rhs) > 1e-8 * scale;
    if (h.tag == TestFunctionTag::kMinorAffine) {
      report.worst_minor_gap = std::max(report.worst_minor_gap, std::abs(lhs - rhs) / scale);
    }
    if (bad) report.violations.push_back({h.name, lhs, rhs});
  }
  return report;
}

TestFunctionFamily standard_test_family(int dim, double p) {
  TestFunctionFamily family;
  family.push_back({"frobenius_p",
                    [p](const Matrix& m) { return std::pow(frobenius_norm(m), p); },
                    TestFunctionTag::kConvex});
  family.push_back({"frobenius_sq",
                    [](const Matrix& m) {
                      const double n = frobenius_norm(m);
                      return n * n;
                    },
                    TestFunctionTag::kConvex});
  family.push_back(
      {"det", [](const Matrix& m) { return determinant(m); }, TestFunctionTag::kMinorAffine});
  family.push_back({"trace",
                    [dim](const Matrix& m) {
                      double t = 0.0;
                      for (int i = 0; i < dim; ++i) t += m(i, i);
                      return t;
                    },
                    TestFunctionTag::kMinorAffine});
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      family.push_back({"entry_" + std::to_string(i) + std::to_string(j),
                        [i, j](const Matrix& m) { return m(i, j); },
                        TestFunctionTag::kMinorAffine});
    }
  }
  return family;
}

LaminateDiagnostics diagnose(const DiscreteLaminate& nu, const PointwiseConstraint& constraint,
                             double p) {
  LaminateDiagnostics diag;
  diag.barycenter_err = frobenius_distance(nu.barycenter(), nu.root);
  diag.moment_p = moment_p(nu, nu.root, p);
  diag.tightness_ratio = tightness_ratio(nu, nu.root, constraint, p).ratio;
  const SupportReport support = support_residual(nu, constraint);
  diag.support_residual = support.good_residual;
  diag.bad_mass = nu.bad_mass();
  diag.minors_gap = minors_consistency(nu);
  diag.depth = nu.case_one_depth;
  return diag;
}

std::string diagnostics_csv_header() {
  return "dim,p,rate,depth,barycenter_err,moment_p,tightness_ratio,bad_mass,minors_gap";
}

std::string diagnostics_csv_row(int dim, double p, double rate, const LaminateDiagnostics& diag) {
  std::ostringstream out;
  out.precision(17);
  out << dim << ',' << p << ',' << rate << ',' << diag.depth << ',' << diag.barycenter_err << ','
      << diag.moment_p << ',' << diag.tightness_ratio << ',' << diag.bad_mass.num_string() << "/2^"
      << diag.bad_mass.log2_den() << ',' << diag.minors_gap;
  return out.str();
}

}  // namespace lamforge
