#include "lamforge/pa_map.hpp"

#include <algorithm>
#include <cmath>

#include "lamforge/errors.hpp"

namespace lamforge {

PiecewiseAffineMap::PiecewiseAffineMap(std::shared_ptr<const SimplicialGrid> grid)
    : grid_(std::move(grid)),
      values_(grid_->vertex_count() * static_cast<std::size_t>(grid_->dim()), 0.0) {}

PiecewiseAffineMap PiecewiseAffineMap::from_function(
    std::shared_ptr<const SimplicialGrid> grid,
    const std::function<void(const std::array<double, 4>&, double*)>& fn) {
  PiecewiseAffineMap map(std::move(grid));
  const SimplicialGrid& g = map.grid();
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    fn(g.vertex_coords(v), map.value(v));
  }
  return map;
}

PiecewiseAffineMap PiecewiseAffineMap::affine(std::shared_ptr<const SimplicialGrid> grid,
                                              const Matrix& a0) {
  const int d = a0.dim();
  return from_function(std::move(grid), [&a0, d](const std::array<double, 4>& x, double* out) {
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += a0(i, j) * x[static_cast<std::size_t>(j)];
      out[i] = s;
    }
  });
}

Matrix PiecewiseAffineMap::gradient(std::size_t cell) const {
  const SimplicialGrid& g = *grid_;
  const int d = g.dim();
  Matrix grad(d);
  std::size_t prev = g.cell_vertex(cell, 0);
  for (int k = 0; k < d; ++k) {
    const std::size_t next = g.cell_vertex(cell, k + 1);
    const int axis = g.cell_axis(cell, k);
    const double inv_h = 1.0 / g.h(axis);
    const double* up = value(prev);
    const double* un = value(next);
    for (int i = 0; i < d; ++i) grad(i, axis) = (un[i] - up[i]) * inv_h;
    prev = next;
  }
  return grad;
}

GradientStats gradient_stats(const PiecewiseAffineMap& map, double p, int bins) {
  if (!(p >= 1.0)) throw ValidationError("gradient_stats requires p >= 1");
  const SimplicialGrid& g = map.grid();
  const double vol = g.cell_volume();
  std::vector<double> dets(g.cell_count());

  GradientStats stats;
  double power_sum = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Matrix grad = map.gradient(c);
    const double det = determinant(grad);
    dets[c] = det;
    power_sum += vol * std::pow(frobenius_norm(grad), p);
    stats.pointwise_det_integral += vol * det;
  }
  stats.lp_norm = std::pow(power_sum, 1.0 / p);

  const auto [lo_it, hi_it] = std::minmax_element(dets.begin(), dets.end());
  stats.det_histogram.lo = *lo_it;
  stats.det_histogram.hi = *hi_it;
  stats.det_histogram.volume.assign(static_cast<std::size_t>(bins), 0.0);
  const double span = *hi_it - *lo_it;
  for (const double det : dets) {
    int bin = span > 0.0 ? static_cast<int>((det - *lo_it) / span * bins) : 0;
    bin = std::clamp(bin, 0, bins - 1);
    stats.det_histogram.volume[static_cast<std::size_t>(bin)] += vol;
  }
  return stats;
}

double det_inlier_fraction(const PiecewiseAffineMap& map, double target, double tol) {
  const SimplicialGrid& g = map.grid();
  std::size_t hits = 0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (std::abs(determinant(map.gradient(c)) - target) <= tol) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(g.cell_count());
}

double vertex_lp_distance(const PiecewiseAffineMap& a, const PiecewiseAffineMap& b, double p) {
  const SimplicialGrid& g = a.grid();
  if (&g.box() != &b.grid().box() && g.vertex_count() != b.grid().vertex_count()) {
    throw ValidationError("vertex_lp_distance requires matching grids");
  }
  const int d = g.dim();
  const double share = g.box_volume() / static_cast<double>(g.vertex_count());
  double sum = 0.0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    double sq = 0.0;
    for (int i = 0; i < d; ++i) {
      const double diff = a.value(v)[i] - b.value(v)[i];
      sq += diff * diff;
    }
    sum += share * std::pow(std::sqrt(sq), p);
  }
  return std::pow(sum, 1.0 / p);
}

double gradient_lp_distance(const PiecewiseAffineMap& a, const PiecewiseAffineMap& b, double p) {
  const SimplicialGrid& g = a.grid();
  if (g.cell_count() != b.grid().cell_count()) {
    throw ValidationError("gradient_lp_distance requires matching grids");
  }
  const double vol = g.cell_volume();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    sum += vol * std::pow(frobenius_distance(a.gradient(c), b.gradient(c)), p);
  }
  return std::pow(sum, 1.0 / p);
}

}  // namespace lamforge
