#pragma once

#include <memory>
#include <string>

#include "json.hpp"
#include "lamforge/integrate.hpp"
#include "lamforge/laminate.hpp"
#include "lamforge/pa_map.hpp"

namespace lamforge {

/// {dim, root, rate, depth, atoms:[{w_num, w_log2_den, matrix, role}], tree:[splits]}.
/// Matrices are row-major arrays; weights stay exact (numerator as decimal text).
nlohmann::json laminate_to_json(const DiscreteLaminate& nu);
DiscreteLaminate laminate_from_json(const nlohmann::json& j);

/// {dim, n, box:{lo, hi}, values}.
nlohmann::json map_to_json(const PiecewiseAffineMap& map);
PiecewiseAffineMap map_from_json(const nlohmann::json& j);

/// CSV rows cell_id, row-major gradient entries, det, volume.
std::string gradient_field_csv(const PiecewiseAffineMap& map);

/// CSV rows iteration, residual, decay_ratio, increment_lp, violation_volume.
std::string iteration_csv(const IterationDiagnostics& diag);

/// Shortest-round-trip decimal text for a double (deterministic output).
std::string format_double(double v);

}  // namespace lamforge
