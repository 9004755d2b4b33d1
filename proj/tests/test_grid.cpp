#include "lamforge/grid.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "lamforge/errors.hpp"
#include "lamforge/pa_map.hpp"
#include "test_util.hpp"

using namespace lamforge;
using lamforge::testing::random_matrix;

TEST_CASE("kuhn grid cell counts and volume") {
  const SimplicialGrid g2 = kuhn_grid(2, 1);
  CHECK(g2.cell_count() == 2);
  CHECK(g2.cell_volume() * static_cast<double>(g2.cell_count()) == doctest::Approx(1.0));

  const SimplicialGrid g3 = kuhn_grid(3, 2);
  CHECK(g3.cell_count() == 48);  // 3! * 2^3
  CHECK(std::abs(g3.cell_volume() * static_cast<double>(g3.cell_count()) - 1.0) <= 1e-12);
}

TEST_CASE("boundary vertices on a 4x4 grid") {
  const SimplicialGrid g = kuhn_grid(2, 4);
  CHECK(g.vertex_count() == 25);
  std::size_t boundary = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (g.is_boundary_vertex(v)) ++boundary;
  CHECK(boundary == 16);
  CHECK(g.boundary_vertex_count() == 16);
}

TEST_CASE("grid guards") {
  CHECK_THROWS_AS(kuhn_grid(5, 2), ValidationError);
  CHECK_THROWS_AS(kuhn_grid(1, 2), ValidationError);
  CHECK_THROWS_AS(kuhn_grid(2, 0), ValidationError);
  Box bad = Box::unit(2);
  bad.hi[0] = 0.0;
  CHECK_THROWS_AS(kuhn_grid(2, 2, bad), ValidationError);
}

TEST_CASE("cell vertices are affinely independent lattice steps") {
  const SimplicialGrid g = kuhn_grid(3, 2);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    // Each step moves exactly one axis, and all axes appear once.
    bool seen[3] = {false, false, false};
    for (int k = 0; k < 3; ++k) {
      const int axis = g.cell_axis(c, k);
      CHECK(!seen[axis]);
      seen[axis] = true;
      const auto a = g.vertex_lattice(g.cell_vertex(c, k));
      const auto b = g.vertex_lattice(g.cell_vertex(c, k + 1));
      int moved = 0;
      for (int i = 0; i < 3; ++i) moved += std::abs(b[static_cast<std::size_t>(i)] -
                                                    a[static_cast<std::size_t>(i)]);
      CHECK(moved == 1);
    }
  }
}

TEST_CASE("affine map has constant gradient and exact stats") {
  std::mt19937_64 rng(21);
  const Matrix a0 = random_matrix(rng, 2);
  auto grid = std::make_shared<const SimplicialGrid>(kuhn_grid(2, 16));
  const PiecewiseAffineMap map = PiecewiseAffineMap::affine(grid, a0);
  for (std::size_t c = 0; c < grid->cell_count(); c += 7) {
    CHECK(frobenius_distance(map.gradient(c), a0) <= 1e-12 * (1.0 + frobenius_norm(a0)));
  }
  const GradientStats stats = gradient_stats(map, 1.5);
  CHECK(stats.lp_norm == doctest::Approx(frobenius_norm(a0)));  // unit volume
  CHECK(stats.pointwise_det_integral == doctest::Approx(determinant(a0)));
}

TEST_CASE("identity map determinant integral") {
  auto grid = std::make_shared<const SimplicialGrid>(kuhn_grid(2, 8));
  const PiecewiseAffineMap map = PiecewiseAffineMap::affine(grid, Matrix::identity(2));
  CHECK(gradient_stats(map, 2.0).pointwise_det_integral == doctest::Approx(1.0));
}

TEST_CASE("gradient reconstructs vertex differences exactly") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto grid = std::make_shared<const SimplicialGrid>(kuhn_grid(3, 3));
  PiecewiseAffineMap map(grid);
  for (double& v : map.values()) v = dist(rng);
  for (std::size_t c = 0; c < grid->cell_count(); c += 5) {
    const Matrix grad = map.gradient(c);
    const std::size_t v0 = grid->cell_vertex(c, 0);
    const auto x0 = grid->vertex_coords(v0);
    for (int k = 1; k <= 3; ++k) {
      const std::size_t vk = grid->cell_vertex(c, k);
      const auto xk = grid->vertex_coords(vk);
      for (int i = 0; i < 3; ++i) {
        double pred = 0.0;
        for (int j = 0; j < 3; ++j)
          pred += grad(i, j) * (xk[static_cast<std::size_t>(j)] - x0[static_cast<std::size_t>(j)]);
        CHECK(std::abs(pred - (map.value(vk)[i] - map.value(v0)[i])) <= 1e-12);
      }
    }
  }
}

TEST_CASE("non-unit box scales mesh widths") {
  Box box = Box::unit(2);
  box.hi[0] = 2.0;
  const SimplicialGrid g = kuhn_grid(2, 4, box);
  CHECK(g.h(0) == doctest::Approx(0.5));
  CHECK(g.h(1) == doctest::Approx(0.25));
  CHECK(std::abs(g.cell_volume() * static_cast<double>(g.cell_count()) - 2.0) <= 1e-12);
}
