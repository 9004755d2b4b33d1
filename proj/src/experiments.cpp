#include "lamforge/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "lamforge/diagnostics.hpp"
#include "lamforge/errors.hpp"
#include "lamforge/serialize.hpp"

namespace lamforge {

namespace {

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write file: " + path.string());
  out << content;
}

/// Appends a config_hash column to every row of a CSV document.
std::string csv_with_hash(const std::string& csv, const std::string& hash) {
  std::string out;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    out += line;
    out += header ? ",config_hash" : "," + hash;
    out += "\n";
    header = false;
  }
  return out;
}

std::string plot_script(const std::string& csv_name, int x_col, int y_col,
                        const std::string& title) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set key autotitle columnhead\n";
  s += "set grid\n";
  s += "set terminal pngcairo size 800,600\n";
  s += "set output 'plot.png'\n";
  s += "plot '" + csv_name + "' using " + std::to_string(x_col) + ":" + std::to_string(y_col) +
       " with linespoints title '" + title + "'\n";
  return s;
}

/// Root / boundary matrix from a selector: id | 2x | affine:<csv> | file:<path>.
Matrix matrix_from_selector(const std::string& selector, int dim) {
  if (selector == "id") return Matrix::identity(dim);
  if (selector == "2x") return 2.0 * Matrix::identity(dim);
  std::vector<double> entries;
  if (selector.rfind("affine:", 0) == 0) {
    std::istringstream in(selector.substr(7));
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        entries.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ValidationError("bad affine entry: " + tok);
      }
    }
  } else if (selector.rfind("file:", 0) == 0) {
    entries = load_json_file(selector.substr(5)).get<std::vector<double>>();
  } else {
    throw ValidationError("unknown boundary selector: " + selector);
  }
  if (entries.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
    throw ValidationError("boundary matrix needs dim^2 entries");
  }
  return Matrix(dim, std::span<const double>(entries));
}

IntegrateOptions options_from(const RunConfig& config) {
  IntegrateOptions opts;
  opts.n0 = config.n_osc;
  opts.freq_ratio = config.freq_ratio;
  return opts;
}

nlohmann::json base_summary(const RunConfig& config) {
  return {{"config", config_to_json(config)}, {"config_hash", config_hash(config)}};
}

void write_common(const RunConfig& config, const nlohmann::json& summary, const std::string& csv,
                  const std::string& plot) {
  if (config.out_dir.empty()) return;
  write_file(config.out_dir, "report.json", summary.dump(2) + "\n");
  write_file(config.out_dir, "diagnostics.csv", csv_with_hash(csv, config_hash(config)));
  write_file(config.out_dir, "plot.gp", plot);
}

nlohmann::json solve_summary(const RunConfig& config, const SolveReport& rep, double inlier) {
  nlohmann::json summary = base_summary(config);
  summary["initial_residual"] = rep.iterations.initial_residual;
  summary["final_residual"] = rep.iterations.records.empty()
                                  ? rep.iterations.initial_residual
                                  : rep.iterations.records.back().residual;
  summary["early_stopped"] = rep.iterations.early_stopped;
  summary["iterations"] = rep.iterations.records.size();
  summary["pointwise_det_integral"] = rep.stats.pointwise_det_integral;
  summary["reference_integral"] = rep.reference_integral;
  summary["gap"] = rep.gap;
  summary["gradient_lp_norm"] = rep.stats.lp_norm;
  summary["det_inlier_fraction"] = inlier;
  return summary;
}

}  // namespace

double EnergyDensity::kappa_value(double s) const {
  if (kappa == Kappa::kNone) return 0.0;
  return s > 0.0 ? 1.0 / s : std::numeric_limits<double>::infinity();
}

double EnergyDensity::value(const Matrix& a) const {
  return std::pow(frobenius_norm(a), p) + kappa_value(determinant(a));
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.subcommand = j.value("subcommand", c.subcommand);
  c.dim = j.value("dim", c.dim);
  c.n = j.value("n", c.n);
  c.p = j.value("p", c.p);
  c.rate = j.value("rate", c.rate);
  if (j.contains("j1") || j.contains("j2")) {
    c.has_interval = true;
    c.j1 = j.value("j1", c.j1);
    c.j2 = j.value("j2", c.j2);
  }
  c.j_file = j.value("j_file", c.j_file);
  c.boundary = j.value("boundary", c.boundary);
  c.iters = j.value("iters", c.iters);
  c.depth = j.value("depth", c.depth);
  c.n_osc = j.value("N", c.n_osc);
  c.freq_ratio = j.value("freq_ratio", c.freq_ratio);
  c.seed = j.value("seed", c.seed);
  c.out_dir = j.value("out", c.out_dir);
  c.epsilons = j.value("epsilons", c.epsilons);
  c.approx_levels = j.value("approx_levels", c.approx_levels);
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j = {{"subcommand", c.subcommand},
                      {"dim", c.dim},
                      {"n", c.n},
                      {"p", c.p},
                      {"rate", c.rate},
                      {"boundary", c.boundary},
                      {"iters", c.iters},
                      {"depth", c.depth},
                      {"N", c.n_osc},
                      {"freq_ratio", c.freq_ratio},
                      {"seed", c.seed},
                      {"epsilons", c.epsilons},
                      {"approx_levels", c.approx_levels}};
  if (c.has_interval) {
    j["j1"] = c.j1;
    j["j2"] = c.j2;
  }
  if (!c.j_file.empty()) j["j_file"] = c.j_file;
  return j;
}

void validate_config(const RunConfig& config) {
  if (config.dim < 2 || config.dim > 8) throw ValidationError("dim must be in [2, 8]");
  if (config.n < 1) throw ValidationError("n must be >= 1");
  if (config.iters < 1) throw ValidationError("iters must be >= 1");
  if (config.depth < 1) throw ValidationError("depth must be >= 1");
  if (config.n_osc < 2) throw ValidationError("N must be >= 2");
  if (config.freq_ratio < 2) throw ValidationError("freq-ratio must be >= 2");
  if (config.has_interval && config.j1 > config.j2) throw ValidationError("need J1 <= J2");
  if (config.p <= 1.0) throw ValidationError("p must be > 1");
  const bool needs_grid = config.subcommand == "solve" || config.subcommand == "approx" ||
                          config.subcommand == "lsc" || config.subcommand == "gap";
  if (needs_grid) {
    if (config.p >= static_cast<double>(config.dim)) {
      throw ValidationError("the oscillation exponent requires p < dim (got p = " +
                            format_double(config.p) + ", dim = " + std::to_string(config.dim) +
                            ")");
    }
    if (config.dim > 4) throw ValidationError("grid runs support dim in [2, 4]");
  }
  if (config.subcommand == "lsc") {
    if (config.epsilons.empty()) throw ValidationError("lsc needs at least one epsilon");
    for (const double e : config.epsilons)
      if (!(e > 0.0)) throw ValidationError("epsilons must be positive");
  }
  if (config.subcommand == "approx" && config.approx_levels < 1) {
    throw ValidationError("approx needs at least one level");
  }
}

std::string config_hash(const RunConfig& config) {
  const std::string text = config_to_json(config).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

BoundaryMap boundary_from_selector(const std::string& selector, int dim) {
  const Matrix a0 = matrix_from_selector(selector, dim);
  return [a0, dim](const std::array<double, 4>& x, double* out) {
    for (int i = 0; i < dim; ++i) {
      double s = 0.0;
      for (int j = 0; j < dim; ++j) s += a0(i, j) * x[static_cast<std::size_t>(j)];
      out[i] = s;
    }
  };
}

ConstraintSpec constraint_from_config(const RunConfig& config, std::size_t cell_count) {
  if (!config.j_file.empty()) {
    std::vector<double> rates = load_json_file(config.j_file).get<std::vector<double>>();
    if (rates.size() != cell_count) {
      throw ValidationError("J table has " + std::to_string(rates.size()) + " entries, grid has " +
                            std::to_string(cell_count) + " cells");
    }
    return ConstraintSpec::exact_table(std::move(rates), config.p, config.dim);
  }
  if (config.has_interval) {
    return ConstraintSpec::interval(config.j1, config.j2, config.p, config.dim);
  }
  return ConstraintSpec::exact(config.rate, config.p, config.dim);
}

LaminateRunReport run_laminate(const RunConfig& config) {
  validate_config(config);
  const Matrix root = matrix_from_selector(config.boundary, config.dim);
  const DiscreteLaminate nu = build_laminate(root, config.rate, config.depth);
  const PointwiseConstraint pc{ConstraintKind::kExact, config.rate, config.rate, config.rate};
  // p only weights the moment here; clamp into the laminate's admissible range.
  const double p = std::min(config.p, static_cast<double>(config.dim) - 0.5);
  const LaminateDiagnostics diag = diagnose(nu, pc, p);

  LaminateRunReport report;
  report.summary = base_summary(config);
  report.summary["atoms"] = nu.atoms.size();
  report.summary["bad_mass"] = nu.bad_mass().to_double();
  report.summary["barycenter_err"] = diag.barycenter_err;
  report.summary["moment_p"] = diag.moment_p;
  report.summary["tightness_ratio"] = diag.tightness_ratio;
  report.summary["minors_gap"] = diag.minors_gap;

  const std::string csv =
      diagnostics_csv_header() + "\n" + diagnostics_csv_row(config.dim, p, config.rate, diag) +
      "\n";
  write_common(config, report.summary, csv, plot_script("diagnostics.csv", 4, 6, "moment_p"));
  if (!config.out_dir.empty()) {
    write_file(config.out_dir, "laminate.json", laminate_to_json(nu).dump(2) + "\n");
  }
  return report;
}

SolveRunReport run_solve(const RunConfig& config) {
  validate_config(config);
  auto grid = std::make_shared<const SimplicialGrid>(kuhn_grid(config.dim, config.n));
  PiecewiseAffineMap map(grid);
  const BoundaryMap g = boundary_from_selector(config.boundary, config.dim);
  const ConstraintSpec spec = constraint_from_config(config, grid->cell_count());

  SolveRunReport report;
  report.solve = solve_prescribed_jacobian(map, g, spec, config.iters, options_from(config));
  report.inlier_fraction = spec.is_constant() && spec.kind() == ConstraintKind::kExact
                               ? det_inlier_fraction(map, config.rate, 0.05)
                               : 0.0;
  report.summary = solve_summary(config, report.solve, report.inlier_fraction);

  write_common(config, report.summary, iteration_csv(report.solve.iterations),
               plot_script("diagnostics.csv", 1, 2, "residual"));
  if (!config.out_dir.empty()) {
    write_file(config.out_dir, "map.json", map_to_json(map).dump() + "\n");
  }
  return report;
}

ApproxReport run_approximation(const RunConfig& config) {
  validate_config(config);
  const BoundaryMap g = boundary_from_selector(config.boundary, config.dim);
  ApproxReport report;
  report.distances_decreasing = true;
  std::string csv = "level,n,distance_lp,gradient_lp,violation_volume\n";

  for (int j = 1; j <= config.approx_levels; ++j) {
    const int n_j = config.n * (1 << (j - 1));
    auto grid = std::make_shared<const SimplicialGrid>(kuhn_grid(config.dim, n_j));
    PiecewiseAffineMap map(grid);
    const ConstraintSpec spec = constraint_from_config(config, grid->cell_count());
    IntegrateOptions opts = options_from(config);
    opts.n0 = config.n_osc * (1 << (j - 1));  // amplitude shrinks with the mesh
    solve_prescribed_jacobian(map, g, spec, config.iters, opts);

    const PiecewiseAffineMap target = PiecewiseAffineMap::from_function(grid, g);
    ApproxLevel level;
    level.n = n_j;
    level.distance_lp = vertex_lp_distance(map, target, config.p);
    level.gradient_lp = gradient_stats(map, config.p).lp_norm;
    level.violation_volume =
        spec.is_constant() && spec.kind() == ConstraintKind::kExact
            ? 1.0 - det_inlier_fraction(map, config.rate, 0.05)
            : 0.0;
    if (!report.levels.empty() &&
        level.distance_lp >= report.levels.back().distance_lp - 1e-15) {
      report.distances_decreasing = false;
    }
    report.levels.push_back(level);
    csv += std::to_string(j) + "," + std::to_string(n_j) + "," +
           format_double(level.distance_lp) + "," + format_double(level.gradient_lp) + "," +
           format_double(level.violation_volume) + "\n";
  }

  report.summary = base_summary(config);
  report.summary["distances_decreasing"] = report.distances_decreasing;
  nlohmann::json levels = nlohmann::json::array();
  for (const ApproxLevel& l : report.levels) {
    levels.push_back({{"n", l.n},
                      {"distance_lp", l.distance_lp},
                      {"gradient_lp", l.gradient_lp},
                      {"violation_volume", l.violation_volume}});
  }
  report.summary["levels"] = std::move(levels);
  write_common(config, report.summary, csv, plot_script("diagnostics.csv", 2, 3, "distance"));
  return report;
}

LscReport run_lsc(const RunConfig& config) {
  validate_config(config);
  const EnergyDensity f{config.p, EnergyDensity::Kappa::kReciprocal};
  LscReport report;
  std::string csv = "eps,f_value,realized_energy,excluded_volume\n";

  for (const double eps : config.epsilons) {
    auto grid = std::make_shared<const SimplicialGrid>(kuhn_grid(config.dim, config.n));
    PiecewiseAffineMap map(grid);
    const Matrix a_eps = eps * Matrix::identity(config.dim);
    const BoundaryMap g = boundary_from_selector("affine:" + [&a_eps] {
      std::string s;
      for (const double v : a_eps.entries()) s += (s.empty() ? "" : ",") + format_double(v);
      return s;
    }(), config.dim);
    const ConstraintSpec spec = ConstraintSpec::exact(1.0, config.p, config.dim);
    solve_prescribed_jacobian(map, g, spec, config.iters, options_from(config));

    LscRow row;
    row.eps = eps;
    row.f_value = f.value(a_eps);
    // Mean energy over cells where kappa is finite; det <= 0 cells are reported
    // as excluded volume instead of blowing the quadrature up.
    for (std::size_t c = 0; c < grid->cell_count(); ++c) {
      const Matrix grad = map.gradient(c);
      const double det = determinant(grad);
      if (det > 0.0) {
        row.realized_energy += grid->cell_volume() * f.value(grad);
      } else {
        row.excluded_volume += grid->cell_volume();
      }
    }
    report.bound_k = std::max(report.bound_k, row.realized_energy);
    report.rows.push_back(row);
    csv += format_double(row.eps) + "," + format_double(row.f_value) + "," +
           format_double(row.realized_energy) + "," + format_double(row.excluded_volume) + "\n";
  }

  report.summary = base_summary(config);
  report.summary["bound_k"] = report.bound_k;
  nlohmann::json rows = nlohmann::json::array();
  for (const LscRow& r : report.rows) {
    rows.push_back({{"eps", r.eps},
                    {"f_value", r.f_value},
                    {"realized_energy", r.realized_energy},
                    {"excluded_volume", r.excluded_volume}});
  }
  report.summary["rows"] = std::move(rows);
  write_common(config, report.summary, csv, plot_script("diagnostics.csv", 1, 2, "f(A_eps)"));
  return report;
}

GapReport run_gap(const RunConfig& config) {
  RunConfig cfg = config;
  cfg.boundary = "id";  // the gap study is pinned to identity boundary data
  const SolveRunReport solve = run_solve(cfg);
  GapReport report;
  report.pointwise_integral = solve.solve.stats.pointwise_det_integral;
  report.reference_integral = solve.solve.reference_integral;
  report.gap = solve.solve.gap;
  report.summary = solve.summary;
  report.summary["config"] = config_to_json(cfg);
  report.summary["config_hash"] = config_hash(cfg);
  return report;
}

DecayReport run_decay(const RunConfig& config) {
  validate_config(config);
  const Matrix root = matrix_from_selector(config.boundary, config.dim);
  const double p = std::min(config.p, static_cast<double>(config.dim) - 0.5);
  DecayReport report;
  std::string csv = "k,bad_mass,moment_p\n";
  for (int k = 1; k <= config.depth; ++k) {
    const DiscreteLaminate nu = build_laminate(root, config.rate, k);
    DecayRow row;
    row.k = k;
    row.bad_mass = nu.bad_mass().to_double();
    row.moment = moment_p(nu, root, p);
    report.rows.push_back(row);
    csv += std::to_string(k) + "," + format_double(row.bad_mass) + "," +
           format_double(row.moment) + "\n";
  }
  report.summary = base_summary(config);
  nlohmann::json rows = nlohmann::json::array();
  for (const DecayRow& r : report.rows) {
    rows.push_back({{"k", r.k}, {"bad_mass", r.bad_mass}, {"moment_p", r.moment}});
  }
  report.summary["rows"] = std::move(rows);
  write_common(config, report.summary, csv, plot_script("diagnostics.csv", 1, 2, "bad mass"));
  return report;
}

int cli_dispatch(int argc, const char* const* argv) {
  // A --config file supplies defaults; explicit flags override it.
  RunConfig cfg;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        cfg = config_from_json(load_json_file(argv[i + 1]));
      } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
      }
    }
  }

  CLI::App app{"finite laminates and prescribed-Jacobian maps"};
  app.require_subcommand(1);
  std::string config_path;
  std::string epsilons_csv;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--dim", cfg.dim, "matrix / grid dimension");
    sub->add_option("--n", cfg.n, "grid subdivisions per axis");
    sub->add_option("--p", cfg.p, "oscillation exponent");
    sub->add_option("--rate", cfg.rate, "exact determinant target");
    sub->add_option("--J", cfg.rate, "alias for --rate");
    auto* j1 = sub->add_option("--J1", cfg.j1, "interval lower bound");
    auto* j2 = sub->add_option("--J2", cfg.j2, "interval upper bound");
    j1->needs(j2);
    j2->needs(j1);
    sub->add_option("--J-file", cfg.j_file, "per-cell rate table (JSON array)");
    sub->add_option("--g", cfg.boundary, "boundary map: id | 2x | affine:<csv> | file:<path>");
    sub->add_option("--depth", cfg.depth, "laminate depth");
    sub->add_option("--iters", cfg.iters, "refinement iterations");
    sub->add_option("--N", cfg.n_osc, "base oscillation count");
    sub->add_option("--freq-ratio", cfg.freq_ratio, "per-depth frequency multiplier");
    sub->add_option("--seed", cfg.seed, "run seed (LAMFORGE_SEED overrides)");
    sub->add_option("--out", cfg.out_dir, "artifact output directory");
    sub->add_option("--config", config_path, "JSON config supplying defaults");
    sub->add_option("--epsilons", epsilons_csv, "comma-separated epsilon list (lsc)");
    sub->add_option("--levels", cfg.approx_levels, "resolution levels (approx)");
    return sub;
  };

  for (const char* name : {"laminate", "solve", "approx", "lsc", "gap", "decay"}) {
    add_common(app.add_subcommand(name));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  const bool interval_given = app.get_subcommands().front()->count("--J1") > 0;
  if (interval_given) cfg.has_interval = true;
  if (!epsilons_csv.empty()) {
    cfg.epsilons.clear();
    std::istringstream in(epsilons_csv);
    std::string tok;
    while (std::getline(in, tok, ',')) cfg.epsilons.push_back(std::atof(tok.c_str()));
  }
  if (const char* env = std::getenv("LAMFORGE_SEED")) {
    cfg.seed = std::strtoull(env, nullptr, 10);
  }

  try {
    nlohmann::json summary;
    if (cfg.subcommand == "laminate") summary = run_laminate(cfg).summary;
    else if (cfg.subcommand == "solve") summary = run_solve(cfg).summary;
    else if (cfg.subcommand == "approx") summary = run_approximation(cfg).summary;
    else if (cfg.subcommand == "lsc") summary = run_lsc(cfg).summary;
    else if (cfg.subcommand == "gap") summary = run_gap(cfg).summary;
    else summary = run_decay(cfg).summary;
    std::printf("%s\n", summary.dump(2).c_str());
    return 0;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 3;
  }
}

}  // namespace lamforge
