#include "lamforge/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "lamforge/errors.hpp"
#include "lamforge/laminate.hpp"

namespace lamforge {

namespace {

void check_conformance(const PiecewiseAffineMap& map, const ConstraintSpec& spec) {
  if (spec.dim() != map.grid().dim()) throw ValidationError("constraint dimension != grid dimension");
  if (!spec.is_constant() && spec.table_size() != map.grid().cell_count()) {
    throw ValidationError("constraint table size != cell count");
  }
}

double cell_weight(const PointwiseConstraint& c, double det, double p, int d) {
  const double r = c.value(det);
  return r > 0.0 ? std::pow(r, p / static_cast<double>(d)) : 0.0;
}

bool violates(const PointwiseConstraint& c, double det) {
  const double magnitude = std::abs(c.target_rate(det));
  return c.value(det) > 1e-10 * (1.0 + magnitude);
}

struct Region {
  Matrix gradient{2};
  PointwiseConstraint constraint{};
  std::vector<std::size_t> cells;
};

std::vector<Region> group_violations(const PiecewiseAffineMap& map, const ConstraintSpec& spec,
                                     std::size_t* violating) {
  std::vector<Region> regions;
  const SimplicialGrid& g = map.grid();
  *violating = 0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Matrix grad = map.gradient(c);
    const PointwiseConstraint pc = spec.at(spec.is_constant() ? 0 : c);
    if (!violates(pc, determinant(grad))) continue;
    ++*violating;
    bool placed = false;
    for (Region& region : regions) {
      if (region.constraint.kind == pc.kind && region.constraint.j1 == pc.j1 &&
          region.constraint.j2 == pc.j2 &&
          frobenius_distance(region.gradient, grad) <=
              1e-7 * (1.0 + frobenius_norm(region.gradient))) {
        region.cells.push_back(c);
        placed = true;
        break;
      }
    }
    // Interface cells carry one-off gradients; beyond this many distinct
    // regions they are left for a later sweep instead of quadratic matching.
    constexpr std::size_t kMaxRegions = 64;
    if (!placed && regions.size() < kMaxRegions) regions.push_back({grad, pc, {c}});
  }
  return regions;
}

}  // namespace

double residual(const PiecewiseAffineMap& map, const ConstraintSpec& spec) {
  check_conformance(map, spec);
  const SimplicialGrid& g = map.grid();
  const double vol = g.cell_volume();
  const int d = g.dim();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const PointwiseConstraint pc = spec.at(spec.is_constant() ? 0 : c);
    sum += vol * cell_weight(pc, determinant(map.gradient(c)), spec.p(), d);
  }
  return sum;
}

RefineStats refine_once(PiecewiseAffineMap& map, const ConstraintSpec& spec, int k, int n_osc,
                        int freq_ratio) {
  check_conformance(map, spec);
  RefineStats stats;
  std::vector<Region> regions = group_violations(map, spec, &stats.violating_cells);
  stats.regions = regions.size();

  const double residual_before = residual(map, spec);
  const std::vector<double> values_before = map.values();
  const int n = map.grid().n();
  // A depth-k laminate oscillates at step depths 0..k-1, so the deepest
  // feasible step depth admits one more laminate level.
  const int cap = feasible_depth(static_cast<double>(n), n_osc, freq_ratio) + 1;
  for (const Region& region : regions) {
    if (cap < 1) continue;  // nothing fits; leave the region for a later sweep
    const int depth = std::min(k, cap);
    const DiscreteLaminate nu = laminate_for_constraint(region.gradient, region.constraint, depth);
    if (nu.is_dirac()) continue;
    try {
      realize_laminate(map, region.cells, nu, n_osc, freq_ratio);
    } catch (const ResolutionExhaustedError&) {
      // The region was narrower than the whole-grid cap suggested; whatever
      // oscillations were placed before the failing level remain valid.
    }
  }
  stats.residual_after = residual(map, spec);
  // A sweep whose oscillations cannot be resolved may only add interface
  // error; keep the map monotone by reverting such sweeps.
  if (stats.residual_after > residual_before) {
    map.values() = values_before;
    stats.residual_after = residual_before;
  }
  return stats;
}

IterationDiagnostics convex_integrate(PiecewiseAffineMap& map, const ConstraintSpec& spec, int L,
                                      const IntegrateOptions& opts) {
  if (L < 1) throw ValidationError("convex_integrate needs L >= 1");
  IterationDiagnostics diag;
  diag.initial_residual = residual(map, spec);
  const double target = opts.target_factor * diag.initial_residual;

  double prev = diag.initial_residual;
  for (int l = 1; l <= L; ++l) {
    if (prev <= target) {
      diag.early_stopped = true;
      break;
    }
    const PiecewiseAffineMap before = map;
    const int k_l = opts.k0 + l;
    const int n_l = opts.n0 * (1 << l);
    const RefineStats step = refine_once(map, spec, k_l, n_l, opts.freq_ratio);

    IterationRecord record;
    record.residual = step.residual_after;
    record.increment_lp = std::pow(gradient_lp_distance(map, before, spec.p()), spec.p());
    record.violation_volume =
        static_cast<double>(step.violating_cells) * map.grid().cell_volume();
    record.decay_ratio = prev > 0.0 ? step.residual_after / prev : 0.0;
    diag.records.push_back(record);
    prev = step.residual_after;
  }
  if (prev <= target) diag.early_stopped = true;
  return diag;
}

SolveReport solve_prescribed_jacobian(PiecewiseAffineMap& map, const BoundaryMap& g,
                                      const ConstraintSpec& spec, int L,
                                      const IntegrateOptions& opts) {
  const SimplicialGrid& grid = map.grid();
  for (std::size_t v = 0; v < grid.vertex_count(); ++v) {
    g(grid.vertex_coords(v), map.value(v));
  }
  SolveReport report;
  report.reference_integral = gradient_stats(map, spec.p()).pointwise_det_integral;
  report.iterations = convex_integrate(map, spec, L, opts);
  report.stats = gradient_stats(map, spec.p());
  report.gap = report.stats.pointwise_det_integral - report.reference_integral;
  return report;
}

}  // namespace lamforge
