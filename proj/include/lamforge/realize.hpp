#pragma once

#include <cstddef>
#include <vector>

#include "lamforge/laminate.hpp"
#include "lamforge/pa_map.hpp"

namespace lamforge {

struct RealizeStats {
  /// Volume fraction of the region carrying each target gradient, in the order
  /// of the step's children (realize_split) or the laminate's atoms
  /// (realize_laminate).
  std::vector<double> fractions;
  /// Fraction matching no target: cutoff bands and oscillation interfaces.
  double off_fraction = 0.0;
};

/// Region = cell indices. Replaces the constant gradient step.parent on the
/// region by the step's children via superposed sawtooth vertex displacements;
/// vertex values on the region's topological boundary (and on the domain
/// boundary) are bit-identical afterwards. N = oscillation periods across the
/// region. A zero-magnitude step leaves the map untouched.
RealizeStats realize_split(PiecewiseAffineMap& map, const std::vector<std::size_t>& region,
                           const SplitStep& step, int N);

/// Applies the laminate's split tree level by level; each depth level runs at
/// frequency N * freq_ratio^depth. Throws ResolutionExhaustedError naming the
/// offending depth when a level's period would drop below 2 cells.
RealizeStats realize_laminate(PiecewiseAffineMap& map, const std::vector<std::size_t>& region,
                              const DiscreteLaminate& nu, int N, int freq_ratio);

/// Deepest laminate level whose oscillation still spans >= 2 cells for a
/// region of the given extent (in cells along the narrowest axis).
int feasible_depth(double extent_cells, int N, int freq_ratio);

/// Volume fractions of region cells whose gradient matches each target within
/// tol; the remainder is returned through off_fraction.
RealizeStats gradient_fractions(const PiecewiseAffineMap& map,
                                const std::vector<std::size_t>& region,
                                const std::vector<Matrix>& targets, double tol);

}  // namespace lamforge
