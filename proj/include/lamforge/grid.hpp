#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace lamforge {

struct Box {
  std::array<double, 4> lo{};
  std::array<double, 4> hi{};

  static Box unit(int dim) {
    Box b;
    for (int i = 0; i < dim; ++i) {
      b.lo[static_cast<std::size_t>(i)] = 0.0;
      b.hi[static_cast<std::size_t>(i)] = 1.0;
    }
    return b;
  }
};

/// Axis-aligned box subdivided into n^d lattice cubes, each cut into the d!
/// simplices x_{pi(1)} >= ... >= x_{pi(d)} (in cube-local coordinates). Cells
/// are addressed as cube * d! + permutation and their vertices are computed on
/// the fly, so the grid itself stays small at n = 256.
class SimplicialGrid {
 public:
  SimplicialGrid(int dim, int n, const Box& box);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  const Box& box() const noexcept { return box_; }
  double h(int axis) const noexcept { return h_[static_cast<std::size_t>(axis)]; }

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t cube_count() const noexcept { return cube_count_; }
  std::size_t cell_count() const noexcept { return cube_count_ * perms_.size(); }
  std::size_t cells_per_cube() const noexcept { return perms_.size(); }
  std::size_t cube_of(std::size_t cell) const noexcept { return cell / perms_.size(); }

  /// All cells have the same volume, prod(h) / d!.
  double cell_volume() const noexcept { return cell_volume_; }
  double box_volume() const noexcept;

  /// k-th vertex of a cell, k in [0, dim]; vertex 0 is the cube corner and each
  /// step adds one lattice edge along the cell's permutation.
  std::size_t cell_vertex(std::size_t cell, int k) const;
  /// Axis moved between cell vertices k and k+1.
  int cell_axis(std::size_t cell, int k) const;

  std::array<int, 4> vertex_lattice(std::size_t v) const;
  std::array<double, 4> vertex_coords(std::size_t v) const;
  std::size_t vertex_at(const std::array<int, 4>& lattice) const;
  std::array<int, 4> cube_lattice(std::size_t cube) const;

  bool is_boundary_vertex(std::size_t v) const;
  std::size_t boundary_vertex_count() const;

 private:
  int dim_;
  int n_;
  Box box_;
  std::array<double, 4> h_{};
  std::size_t vertex_count_;
  std::size_t cube_count_;
  double cell_volume_;
  std::vector<std::array<int, 4>> perms_;
};

/// Guards 2 <= d <= 4 (realization cost) and n >= 1.
SimplicialGrid kuhn_grid(int dim, int n, const Box& box);
SimplicialGrid kuhn_grid(int dim, int n);

}  // namespace lamforge
