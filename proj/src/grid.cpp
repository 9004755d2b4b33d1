#include "lamforge/grid.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "lamforge/errors.hpp"

namespace lamforge {

SimplicialGrid::SimplicialGrid(int dim, int n, const Box& box) : dim_(dim), n_(n), box_(box) {
  if (dim < 2 || dim > 4) {
    throw ValidationError("grid dimension must lie in [2,4], got " + std::to_string(dim));
  }
  if (n < 1) throw ValidationError("grid needs n >= 1 subdivisions");
  double vol = 1.0;
  for (int a = 0; a < dim; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    const double len = box.hi[ia] - box.lo[ia];
    if (!(len > 0.0)) throw ValidationError("grid box must have positive extent on every axis");
    h_[ia] = len / n;
    vol *= len;
  }
  vertex_count_ = 1;
  cube_count_ = 1;
  for (int a = 0; a < dim; ++a) {
    vertex_count_ *= static_cast<std::size_t>(n + 1);
    cube_count_ *= static_cast<std::size_t>(n);
  }
  std::array<int, 4> perm{};
  std::iota(perm.begin(), perm.begin() + dim, 0);
  do {
    perms_.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.begin() + dim));
  cell_volume_ = vol / static_cast<double>(cube_count_) / static_cast<double>(perms_.size());
}

double SimplicialGrid::box_volume() const noexcept {
  double vol = 1.0;
  for (int a = 0; a < dim_; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    vol *= box_.hi[ia] - box_.lo[ia];
  }
  return vol;
}

std::size_t SimplicialGrid::cell_vertex(std::size_t cell, int k) const {
  const std::array<int, 4>& perm = perms_[cell % perms_.size()];
  std::array<int, 4> lat = cube_lattice(cell / perms_.size());
  for (int step = 0; step < k; ++step) ++lat[static_cast<std::size_t>(perm[static_cast<std::size_t>(step)])];
  return vertex_at(lat);
}

int SimplicialGrid::cell_axis(std::size_t cell, int k) const {
  return perms_[cell % perms_.size()][static_cast<std::size_t>(k)];
}

std::array<int, 4> SimplicialGrid::vertex_lattice(std::size_t v) const {
  std::array<int, 4> lat{};
  const std::size_t stride = static_cast<std::size_t>(n_ + 1);
  for (int a = 0; a < dim_; ++a) {
    lat[static_cast<std::size_t>(a)] = static_cast<int>(v % stride);
    v /= stride;
  }
  return lat;
}

std::array<double, 4> SimplicialGrid::vertex_coords(std::size_t v) const {
  const std::array<int, 4> lat = vertex_lattice(v);
  std::array<double, 4> x{};
  for (int a = 0; a < dim_; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    x[ia] = box_.lo[ia] + h_[ia] * lat[ia];
  }
  return x;
}

std::size_t SimplicialGrid::vertex_at(const std::array<int, 4>& lattice) const {
  std::size_t v = 0;
  std::size_t stride = 1;
  for (int a = 0; a < dim_; ++a) {
    v += static_cast<std::size_t>(lattice[static_cast<std::size_t>(a)]) * stride;
    stride *= static_cast<std::size_t>(n_ + 1);
  }
  return v;
}

std::array<int, 4> SimplicialGrid::cube_lattice(std::size_t cube) const {
  std::array<int, 4> lat{};
  const std::size_t stride = static_cast<std::size_t>(n_);
  for (int a = 0; a < dim_; ++a) {
    lat[static_cast<std::size_t>(a)] = static_cast<int>(cube % stride);
    cube /= stride;
  }
  return lat;
}

bool SimplicialGrid::is_boundary_vertex(std::size_t v) const {
  const std::array<int, 4> lat = vertex_lattice(v);
  for (int a = 0; a < dim_; ++a) {
    const int c = lat[static_cast<std::size_t>(a)];
    if (c == 0 || c == n_) return true;
  }
  return false;
}

std::size_t SimplicialGrid::boundary_vertex_count() const {
  std::size_t interior = 1;
  for (int a = 0; a < dim_; ++a) interior *= static_cast<std::size_t>(std::max(0, n_ - 1));
  return vertex_count_ - interior;
}

SimplicialGrid kuhn_grid(int dim, int n, const Box& box) { return SimplicialGrid(dim, n, box); }

SimplicialGrid kuhn_grid(int dim, int n) { return SimplicialGrid(dim, n, Box::unit(dim)); }

}  // namespace lamforge
