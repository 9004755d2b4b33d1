#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lamforge/integrate.hpp"

namespace lamforge {

/// Stored elastic energy f(A) = |A|_F^p + kappa(det A) with a singular
/// compression modulus. The reciprocal modulus is kappa(s) = 1/s for s > 0 and
/// +infinity otherwise; kNone drops the determinant term.
struct EnergyDensity {
  enum class Kappa { kReciprocal, kNone };

  double p = 1.5;
  Kappa kappa = Kappa::kReciprocal;

  double kappa_value(double s) const;
  double value(const Matrix& a) const;
};

/// One experiment run: subcommand plus every knob the CLI exposes. Loadable
/// from JSON (--config) with flags overriding file values.
struct RunConfig {
  std::string subcommand;
  int dim = 2;
  int n = 64;
  double p = 1.5;

  // Constraint: exact rate, interval [j1, j2], or a per-cell rate table file.
  double rate = 2.0;
  bool has_interval = false;
  double j1 = 0.0;
  double j2 = 0.0;
  std::string j_file;

  // Boundary selector: id | 2x | affine:<csv entries> | file:<json path>.
  std::string boundary = "id";

  int iters = 4;
  int depth = 8;
  int n_osc = 4;
  int freq_ratio = 8;
  std::uint64_t seed = 0;
  std::string out_dir;

  std::vector<double> epsilons{0.5, 0.1, 0.02};
  int approx_levels = 3;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
/// Rejects every downstream precondition violation before any compute.
void validate_config(const RunConfig& config);
/// FNV-1a hash of the canonical config JSON, as fixed-width hex.
std::string config_hash(const RunConfig& config);

BoundaryMap boundary_from_selector(const std::string& selector, int dim);
ConstraintSpec constraint_from_config(const RunConfig& config, std::size_t cell_count);

struct LaminateRunReport {
  nlohmann::json summary;
};
LaminateRunReport run_laminate(const RunConfig& config);

struct SolveRunReport {
  SolveReport solve;
  double inlier_fraction = 0.0;
  nlohmann::json summary;
};
SolveRunReport run_solve(const RunConfig& config);

struct ApproxLevel {
  int n = 0;
  double distance_lp = 0.0;
  double gradient_lp = 0.0;
  double violation_volume = 0.0;
};
struct ApproxReport {
  std::vector<ApproxLevel> levels;
  bool distances_decreasing = false;
  nlohmann::json summary;
};
/// Resolution ladder n_j = n * 2^(j-1) with oscillation count scaled in step,
/// so the perturbation amplitude shrinks with the mesh.
ApproxReport run_approximation(const RunConfig& config);

struct LscRow {
  double eps = 0.0;
  double f_value = 0.0;          // f(eps * I)
  double realized_energy = 0.0;  // mean energy over det > 0 cells
  double excluded_volume = 0.0;  // volume of det <= 0 cells (kappa infinite)
};
struct LscReport {
  std::vector<LscRow> rows;
  double bound_k = 0.0;  // max realized energy over the eps list
  nlohmann::json summary;
};
LscReport run_lsc(const RunConfig& config);

struct GapReport {
  double pointwise_integral = 0.0;
  double reference_integral = 0.0;
  double gap = 0.0;
  nlohmann::json summary;
};
GapReport run_gap(const RunConfig& config);

struct DecayRow {
  int k = 0;
  double bad_mass = 0.0;
  double moment = 0.0;
};
struct DecayReport {
  std::vector<DecayRow> rows;
  nlohmann::json summary;
};
DecayReport run_decay(const RunConfig& config);

/// Parses argv, runs the subcommand, writes artifacts to --out if given.
/// Exit 0 on success, 2 on validation errors, 3 on runtime errors.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace lamforge
