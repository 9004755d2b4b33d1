#pragma once

#include <cstddef>
#include <vector>

namespace lamforge {

enum class ConstraintKind { kExact, kInterval };

/// Determinant target at a single point: either det = rate or det in [j1, j2].
struct PointwiseConstraint {
  ConstraintKind kind;
  double rate = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;

  /// Constraint value R(A) given det A: |det - rate| for the exact kind,
  /// max{j1 - det, det - j2, 0} for the interval kind. Always >= 0.
  double value(double det) const;
  /// Nearest admissible determinant (the clamped rate r_M).
  double target_rate(double det) const;
};

/// Constraint over a grid: exact rate or interval bounds, constant or per-cell,
/// with the oscillation exponent p. Requires 1 < p < dim.
class ConstraintSpec {
 public:
  static ConstraintSpec exact(double rate, double p, int dim);
  static ConstraintSpec exact_table(std::vector<double> rates, double p, int dim);
  static ConstraintSpec interval(double j1, double j2, double p, int dim);
  static ConstraintSpec interval_table(std::vector<double> j1, std::vector<double> j2, double p,
                                       int dim);

  ConstraintKind kind() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  int dim() const noexcept { return dim_; }
  /// 1 for a constant constraint, otherwise the cell count it was built for.
  std::size_t table_size() const noexcept { return j1_.size(); }
  bool is_constant() const noexcept { return j1_.size() == 1; }

  PointwiseConstraint at(std::size_t cell) const;

 private:
  ConstraintSpec(ConstraintKind kind, std::vector<double> j1, std::vector<double> j2, double p,
                 int dim);

  ConstraintKind kind_;
  std::vector<double> j1_;  // for kExact both tables hold the rate
  std::vector<double> j2_;
  double p_;
  int dim_;
};

}  // namespace lamforge
