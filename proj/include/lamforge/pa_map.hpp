#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "lamforge/grid.hpp"
#include "lamforge/matrix.hpp"

namespace lamforge {

/// Continuous piecewise-affine map determined by one vector value per grid
/// vertex. The per-cell gradient follows from vertex differences along the
/// cell's lattice edges, so it is exact (no linear solve involved).
class PiecewiseAffineMap {
 public:
  explicit PiecewiseAffineMap(std::shared_ptr<const SimplicialGrid> grid);

  static PiecewiseAffineMap from_function(
      std::shared_ptr<const SimplicialGrid> grid,
      const std::function<void(const std::array<double, 4>&, double*)>& fn);
  static PiecewiseAffineMap affine(std::shared_ptr<const SimplicialGrid> grid, const Matrix& a0);

  const SimplicialGrid& grid() const noexcept { return *grid_; }
  std::shared_ptr<const SimplicialGrid> grid_ptr() const noexcept { return grid_; }

  double* value(std::size_t v) { return values_.data() + v * static_cast<std::size_t>(grid_->dim()); }
  const double* value(std::size_t v) const {
    return values_.data() + v * static_cast<std::size_t>(grid_->dim());
  }
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  Matrix gradient(std::size_t cell) const;

 private:
  std::shared_ptr<const SimplicialGrid> grid_;
  std::vector<double> values_;
};

struct DetHistogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> volume;  // per-bin cell volume
};

struct GradientStats {
  double lp_norm = 0.0;
  DetHistogram det_histogram;
  double pointwise_det_integral = 0.0;
};

/// Exact cellwise quadrature: gradients are constant per cell.
GradientStats gradient_stats(const PiecewiseAffineMap& map, double p, int bins = 64);

/// Volume fraction of cells whose determinant lies within tol of target.
double det_inlier_fraction(const PiecewiseAffineMap& map, double target, double tol);

/// Discrete L^p distance of vertex values, weighted by the vertex cell share.
double vertex_lp_distance(const PiecewiseAffineMap& a, const PiecewiseAffineMap& b, double p);

/// L^p norm of the gradient difference field, cellwise.
double gradient_lp_distance(const PiecewiseAffineMap& a, const PiecewiseAffineMap& b, double p);

}  // namespace lamforge
