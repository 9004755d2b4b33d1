#include "lamforge/experiments.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lamforge/errors.hpp"
#include "lamforge/serialize.hpp"

using namespace lamforge;

namespace {

int dispatch(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"lamforge"};
  argv.insert(argv.end(), args.begin(), args.end());
  return cli_dispatch(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("laminate subcommand writes artifacts and exits 0") {
  TempDir dir("lamforge_cli_laminate");
  CHECK(dispatch({"laminate", "--dim", "3", "--rate", "3", "--depth", "6", "--out",
                  dir.str().c_str()}) == 0);
  for (const char* name : {"laminate.json", "diagnostics.csv", "report.json", "plot.gp"}) {
    CHECK(std::filesystem::exists(dir.path / name));
  }
  // The laminate document round-trips.
  nlohmann::json doc = nlohmann::json::parse(slurp(dir.path / "laminate.json"));
  const DiscreteLaminate nu = laminate_from_json(doc);
  CHECK(nu.root.dim() == 3);
  CHECK(nu.case_one_depth == 6);
  CHECK(nu.bad_mass() == Dyadic::pow2(6));
  CHECK(laminate_to_json(nu) == doc);
  // Every CSV row carries the config hash.
  std::istringstream csv(slurp(dir.path / "diagnostics.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header.find("config_hash") != std::string::npos);
  CHECK(row.substr(row.rfind(',') + 1).size() == 16);  // fnv hex
}

TEST_CASE("solve subcommand writes map and decay CSV") {
  TempDir dir("lamforge_cli_solve");
  CHECK(dispatch({"solve", "--dim", "2", "--n", "32", "--p", "1.5", "--J", "2", "--g", "id",
                  "--iters", "2", "--out", dir.str().c_str()}) == 0);
  const PiecewiseAffineMap map =
      map_from_json(nlohmann::json::parse(slurp(dir.path / "map.json")));
  CHECK(map.grid().dim() == 2);
  CHECK(map.grid().n() == 32);
  // Boundary vertices carry the identity data exactly.
  for (std::size_t v = 0; v < map.grid().vertex_count(); ++v) {
    if (!map.grid().is_boundary_vertex(v)) continue;
    const auto x = map.grid().vertex_coords(v);
    CHECK(map.value(v)[0] == x[0]);
    CHECK(map.value(v)[1] == x[1]);
  }
  const std::string csv = slurp(dir.path / "diagnostics.csv");
  CHECK(csv.rfind("iteration,residual,decay_ratio,increment_lp,violation_volume,config_hash",
                  0) == 0);
}

TEST_CASE("p >= dim is rejected with exit code 2") {
  CHECK(dispatch({"solve", "--p", "2.5", "--dim", "2"}) == 2);
  CHECK(dispatch({"solve", "--p", "2", "--dim", "2"}) == 2);
  CHECK_THROWS_AS(
      [] {
        RunConfig cfg;
        cfg.subcommand = "solve";
        cfg.p = 2.0;
        cfg.dim = 2;
        validate_config(cfg);
      }(),
      ValidationError);
}

TEST_CASE("bad flags and unknown selectors exit 2") {
  CHECK(dispatch({"solve", "--dim", "2", "--g", "bogus"}) == 2);
  CHECK(dispatch({"frobnicate"}) == 2);
  CHECK(dispatch({"solve", "--J1", "3", "--J2", "1", "--dim", "2", "--n", "8"}) == 2);
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
  TempDir a("lamforge_cli_det_a");
  TempDir b("lamforge_cli_det_b");
  const auto run = [](const std::string& out) {
    return dispatch({"solve", "--dim", "2", "--n", "16", "--p", "1.5", "--J", "2", "--iters",
                     "2", "--seed", "42", "--out", out.c_str()});
  };
  REQUIRE(run(a.str()) == 0);
  REQUIRE(run(b.str()) == 0);
  for (const char* name : {"map.json", "diagnostics.csv", "report.json", "plot.gp"}) {
    CHECK(slurp(a.path / name) == slurp(b.path / name));
  }
}

TEST_CASE("config file supplies defaults and flags override") {
  TempDir dir("lamforge_cli_config");
  std::filesystem::create_directories(dir.path);
  const std::filesystem::path cfg_path = dir.path / "run.json";
  {
    std::ofstream out(cfg_path);
    out << nlohmann::json{{"dim", 3}, {"rate", 3.0}, {"depth", 4}}.dump();
  }
  // Flag --depth overrides the file; dim/rate come from the file.
  const std::string out_dir = (dir.path / "out").string();
  CHECK(dispatch({"laminate", "--config", cfg_path.string().c_str(), "--depth", "2", "--out",
                  out_dir.c_str()}) == 0);
  const nlohmann::json doc =
      nlohmann::json::parse(slurp(dir.path / "out" / "laminate.json"));
  CHECK(doc.at("dim") == 3);
  CHECK(doc.at("rate") == 3.0);
  CHECK(doc.at("depth") == 2);
}

TEST_CASE("LAMFORGE_SEED overrides the flag") {
  TempDir dir("lamforge_cli_seed");
  setenv("LAMFORGE_SEED", "777", 1);
  CHECK(dispatch({"decay", "--dim", "2", "--rate", "2", "--depth", "2", "--out",
                  dir.str().c_str()}) == 0);
  unsetenv("LAMFORGE_SEED");
  const nlohmann::json rep = nlohmann::json::parse(slurp(dir.path / "report.json"));
  CHECK(rep.at("config").at("seed") == 777);
}

TEST_CASE("map JSON round-trip and gradient CSV") {
  auto grid = std::make_shared<const SimplicialGrid>(kuhn_grid(2, 4));
  PiecewiseAffineMap map = PiecewiseAffineMap::affine(grid, Matrix(2, {1.0, 0.5, 0.0, 2.0}));
  const PiecewiseAffineMap back = map_from_json(map_to_json(map));
  CHECK(back.values() == map.values());
  CHECK(back.grid().n() == 4);

  const std::string csv = gradient_field_csv(map);
  CHECK(csv.rfind("cell_id,g00,g01,g10,g11,det,volume", 0) == 0);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",2") != std::string::npos);  // det = 2 on every cell
  }
  CHECK(rows == grid->cell_count());
}

TEST_CASE("run_lsc reports bounded realized energies") {
  RunConfig cfg;
  cfg.subcommand = "lsc";
  cfg.dim = 2;
  cfg.n = 32;
  cfg.p = 1.5;
  cfg.iters = 2;
  cfg.epsilons = {0.5, 0.1};
  const LscReport rep = run_lsc(cfg);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].f_value > rep.rows[0].f_value);  // f grows as eps shrinks
  for (const LscRow& row : rep.rows) {
    CHECK(std::isfinite(row.realized_energy));
    CHECK(row.realized_energy <= rep.bound_k);
  }
}

TEST_CASE("run_gap with rate 1 reports a vanishing gap") {
  RunConfig cfg;
  cfg.subcommand = "gap";
  cfg.dim = 2;
  cfg.n = 16;
  cfg.p = 1.5;
  cfg.rate = 1.0;
  cfg.iters = 1;
  const GapReport rep = run_gap(cfg);
  CHECK(rep.reference_integral == doctest::Approx(1.0));
  CHECK(std::abs(rep.gap) <= 1e-9);
}

TEST_CASE("run_decay tabulates the exact mass law") {
  RunConfig cfg;
  cfg.subcommand = "decay";
  cfg.dim = 3;
  cfg.rate = 3.0;
  cfg.depth = 6;
  const DecayReport rep = run_decay(cfg);
  REQUIRE(rep.rows.size() == 6);
  for (const DecayRow& row : rep.rows) {
    CHECK(row.bad_mass == std::ldexp(1.0, -row.k));
    CHECK(row.moment > 0.0);
  }
}
