#include "lamforge/constraint.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "lamforge/errors.hpp"

namespace lamforge {

double PointwiseConstraint::value(double det) const {
  if (kind == ConstraintKind::kExact) return std::abs(det - rate);
  return std::max({j1 - det, det - j2, 0.0});
}

double PointwiseConstraint::target_rate(double det) const {
  if (kind == ConstraintKind::kExact) return rate;
  if (det < j1) return j1;
  if (det > j2) return j2;
  return det;
}

ConstraintSpec::ConstraintSpec(ConstraintKind kind, std::vector<double> j1, std::vector<double> j2,
                               double p, int dim)
    : kind_(kind), j1_(std::move(j1)), j2_(std::move(j2)), p_(p), dim_(dim) {
  if (!(p > 1.0 && p < static_cast<double>(dim))) {
    throw ValidationError("exponent p = " + std::to_string(p) + " must satisfy 1 < p < d = " +
                          std::to_string(dim));
  }
  if (j1_.empty() || j1_.size() != j2_.size()) {
    throw ValidationError("constraint tables must be nonempty and equally sized");
  }
  for (std::size_t i = 0; i < j1_.size(); ++i) {
    if (std::isnan(j1_[i]) || std::isnan(j2_[i]) || j1_[i] > j2_[i]) {
      throw ValidationError("constraint requires J1 <= J2 cellwise");
    }
    if (kind_ == ConstraintKind::kExact && !std::isfinite(j1_[i])) {
      throw ValidationError("exact rate must be finite");
    }
  }
}

ConstraintSpec ConstraintSpec::exact(double rate, double p, int dim) {
  return ConstraintSpec(ConstraintKind::kExact, {rate}, {rate}, p, dim);
}

ConstraintSpec ConstraintSpec::exact_table(std::vector<double> rates, double p, int dim) {
  std::vector<double> copy = rates;
  return ConstraintSpec(ConstraintKind::kExact, std::move(rates), std::move(copy), p, dim);
}

ConstraintSpec ConstraintSpec::interval(double j1, double j2, double p, int dim) {
  return ConstraintSpec(ConstraintKind::kInterval, {j1}, {j2}, p, dim);
}

ConstraintSpec ConstraintSpec::interval_table(std::vector<double> j1, std::vector<double> j2,
                                              double p, int dim) {
  return ConstraintSpec(ConstraintKind::kInterval, std::move(j1), std::move(j2), p, dim);
}

PointwiseConstraint ConstraintSpec::at(std::size_t cell) const {
  const std::size_t i = j1_.size() == 1 ? 0 : cell;
  if (i >= j1_.size()) throw ValidationError("constraint table index out of range");
  return {kind_, j1_[i], j1_[i], j2_[i]};
}

}  // namespace lamforge
