#include "lamforge/serialize.hpp"

#include <charconv>
#include <cstdint>

#include "lamforge/errors.hpp"

namespace lamforge {

namespace {

const char* role_name(AtomRole role) {
  switch (role) {
    case AtomRole::kGood: return "good";
    case AtomRole::kBad: return "bad";
    case AtomRole::kContinue: return "continue";
  }
  throw ValidationError("unknown atom role");
}

AtomRole role_from(const std::string& name) {
  if (name == "good") return AtomRole::kGood;
  if (name == "bad") return AtomRole::kBad;
  if (name == "continue") return AtomRole::kContinue;
  throw ValidationError("unknown atom role: " + name);
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const double v : m.entries()) entries.push_back(v);
  return entries;
}

Matrix matrix_from_json(const nlohmann::json& j, int dim) {
  const std::vector<double> entries = j.get<std::vector<double>>();
  if (entries.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
    throw ValidationError("matrix entry count does not match dim");
  }
  return Matrix(dim, std::span<const double>(entries));
}

Dyadic dyadic_from_json(const nlohmann::json& atom) {
  const std::string text = atom.at("w_num").get<std::string>();
  unsigned __int128 num = 0;
  for (const char c : text) {
    if (c < '0' || c > '9') throw ValidationError("bad dyadic numerator: " + text);
    num = num * 10 + static_cast<unsigned>(c - '0');
  }
  return Dyadic(num, atom.at("w_log2_den").get<unsigned>());
}

template <typename T>
nlohmann::json weighted_to_json(const T& entry) {
  return {{"w_num", entry.weight.num_string()},
          {"w_log2_den", entry.weight.log2_den()},
          {"matrix", matrix_to_json(entry.matrix)},
          {"role", role_name(entry.role)}};
}

}  // namespace

nlohmann::json laminate_to_json(const DiscreteLaminate& nu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const Atom& a : nu.atoms) atoms.push_back(weighted_to_json(a));

  nlohmann::json tree = nlohmann::json::array();
  for (const SplitStep& step : nu.tree) {
    nlohmann::json children = nlohmann::json::array();
    for (const SplitChild& c : step.children) children.push_back(weighted_to_json(c));
    tree.push_back({{"parent", matrix_to_json(step.parent)},
                    {"case", step.case_tag == CaseTag::kCaseOne ? 1 : 2},
                    {"magnitude", step.magnitude},
                    {"depth", step.depth},
                    {"children", std::move(children)}});
  }

  return {{"dim", nu.root.dim()},
          {"root", matrix_to_json(nu.root)},
          {"rate", nu.rate},
          {"depth", nu.case_one_depth},
          {"atoms", std::move(atoms)},
          {"tree", std::move(tree)}};
}

DiscreteLaminate laminate_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  DiscreteLaminate nu;
  nu.root = matrix_from_json(j.at("root"), dim);
  nu.rate = j.at("rate").get<double>();
  nu.case_one_depth = j.at("depth").get<int>();
  for (const nlohmann::json& a : j.at("atoms")) {
    nu.atoms.push_back({dyadic_from_json(a), matrix_from_json(a.at("matrix"), dim),
                        role_from(a.at("role").get<std::string>())});
  }
  for (const nlohmann::json& s : j.at("tree")) {
    SplitStep step;
    step.parent = matrix_from_json(s.at("parent"), dim);
    step.case_tag = s.at("case").get<int>() == 1 ? CaseTag::kCaseOne : CaseTag::kCaseTwo;
    step.magnitude = s.at("magnitude").get<double>();
    step.depth = s.at("depth").get<int>();
    for (const nlohmann::json& c : s.at("children")) {
      step.children.push_back({dyadic_from_json(c), matrix_from_json(c.at("matrix"), dim),
                               role_from(c.at("role").get<std::string>())});
    }
    nu.tree.push_back(std::move(step));
  }
  if (nu.atoms.empty()) throw ValidationError("laminate document has no atoms");
  return nu;
}

nlohmann::json map_to_json(const PiecewiseAffineMap& map) {
  const SimplicialGrid& g = map.grid();
  nlohmann::json lo = nlohmann::json::array();
  nlohmann::json hi = nlohmann::json::array();
  for (int i = 0; i < g.dim(); ++i) {
    lo.push_back(g.box().lo[static_cast<std::size_t>(i)]);
    hi.push_back(g.box().hi[static_cast<std::size_t>(i)]);
  }
  return {{"dim", g.dim()},
          {"n", g.n()},
          {"box", {{"lo", std::move(lo)}, {"hi", std::move(hi)}}},
          {"values", map.values()}};
}

PiecewiseAffineMap map_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  const int n = j.at("n").get<int>();
  Box box = Box::unit(dim);
  const std::vector<double> lo = j.at("box").at("lo").get<std::vector<double>>();
  const std::vector<double> hi = j.at("box").at("hi").get<std::vector<double>>();
  if (lo.size() != static_cast<std::size_t>(dim) || hi.size() != static_cast<std::size_t>(dim)) {
    throw ValidationError("box extent count does not match dim");
  }
  for (int i = 0; i < dim; ++i) {
    box.lo[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
    box.hi[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)];
  }
  auto grid = std::make_shared<const SimplicialGrid>(kuhn_grid(dim, n, box));
  PiecewiseAffineMap map(grid);
  std::vector<double> values = j.at("values").get<std::vector<double>>();
  if (values.size() != map.values().size()) {
    throw ValidationError("value count does not match grid vertices");
  }
  map.values() = std::move(values);
  return map;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string gradient_field_csv(const PiecewiseAffineMap& map) {
  const SimplicialGrid& g = map.grid();
  std::string out = "cell_id";
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j)
      out += ",g" + std::to_string(i) + std::to_string(j);
  out += ",det,volume\n";
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Matrix grad = map.gradient(c);
    out += std::to_string(c);
    for (const double v : grad.entries()) out += "," + format_double(v);
    out += "," + format_double(determinant(grad));
    out += "," + format_double(g.cell_volume());
    out += "\n";
  }
  return out;
}

std::string iteration_csv(const IterationDiagnostics& diag) {
  std::string out = "iteration,residual,decay_ratio,increment_lp,violation_volume\n";
  out += "0," + format_double(diag.initial_residual) + ",1,0,0\n";
  for (std::size_t i = 0; i < diag.records.size(); ++i) {
    const IterationRecord& r = diag.records[i];
    out += std::to_string(i + 1);
    out += "," + format_double(r.residual);
    out += "," + format_double(r.decay_ratio);
    out += "," + format_double(r.increment_lp);
    out += "," + format_double(r.violation_volume);
    out += "\n";
  }
  return out;
}

}  // namespace lamforge
