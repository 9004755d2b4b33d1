#pragma once

#include <functional>
#include <vector>

#include "lamforge/constraint.hpp"
#include "lamforge/pa_map.hpp"
#include "lamforge/realize.hpp"

namespace lamforge {

struct IterationRecord {
  double residual = 0.0;
  double increment_lp = 0.0;  // ||grad v_new - grad v_old||_p^p
  double violation_volume = 0.0;
  double decay_ratio = 0.0;
};

struct IterationDiagnostics {
  double initial_residual = 0.0;
  std::vector<IterationRecord> records;
  bool early_stopped = false;
};

struct IntegrateOptions {
  int k0 = 3;          // laminate depth offset, k_l = k0 + l
  int n0 = 4;          // oscillation count base, N_l = n0 * 2^l
  int freq_ratio = 8;  // per-depth frequency multiplier inside one realization
  double target_factor = 1e-3;  // early stop at target_factor * initial residual
};

/// Sum over cells of vol * max{R(gradient), 0}^(p/d); exact quadrature.
double residual(const PiecewiseAffineMap& map, const ConstraintSpec& spec);

struct RefineStats {
  double residual_after = 0.0;
  std::size_t violating_cells = 0;
  std::size_t regions = 0;
};

/// One sweep: violating cells are grouped into constant-gradient regions, each
/// region gets a constraint-matching laminate realized in place. Boundary
/// vertex values are untouched. Depth is capped to what the resolution admits;
/// a region too small to carry even the root oscillation is left as is.
RefineStats refine_once(PiecewiseAffineMap& map, const ConstraintSpec& spec, int k, int n_osc,
                        int freq_ratio);

IterationDiagnostics convex_integrate(PiecewiseAffineMap& map, const ConstraintSpec& spec, int L,
                                      const IntegrateOptions& opts = {});

using BoundaryMap = std::function<void(const std::array<double, 4>&, double*)>;

struct SolveReport {
  IterationDiagnostics iterations;
  GradientStats stats;
  /// Pointwise determinant integral of the initial boundary extension; for
  /// identical boundary values this is the null-Lagrangian reference.
  double reference_integral = 0.0;
  /// stats.pointwise_det_integral - reference_integral.
  double gap = 0.0;
};

/// Evaluates g at every vertex as the initial extension, then runs
/// convex_integrate against Exact(J) / the given constraint.
SolveReport solve_prescribed_jacobian(PiecewiseAffineMap& map, const BoundaryMap& g,
                                      const ConstraintSpec& spec, int L,
                                      const IntegrateOptions& opts = {});

}  // namespace lamforge
