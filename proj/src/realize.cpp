#include "lamforge/realize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "lamforge/errors.hpp"

namespace lamforge {

namespace {

constexpr double kMatchTol = 1e-7;

bool rank_one_factors(const Matrix& m, std::vector<double>& a, std::vector<double>& b) {
  const int d = m.dim();
  a.assign(static_cast<std::size_t>(d), 0.0);
  b.assign(static_cast<std::size_t>(d), 0.0);
  int jmax = 0;
  double best = -1.0;
  for (int j = 0; j < d; ++j) {
    double sq = 0.0;
    for (int i = 0; i < d; ++i) sq += m(i, j) * m(i, j);
    if (sq > best) {
      best = sq;
      jmax = j;
    }
  }
  if (!(best > 1e-28)) return false;
  const double nrm = std::sqrt(best);
  for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i)] = m(i, jmax) / nrm;
  for (int j = 0; j < d; ++j) {
    double dot = 0.0;
    for (int i = 0; i < d; ++i) dot += a[static_cast<std::size_t>(i)] * m(i, j);
    b[static_cast<std::size_t>(j)] = dot;
  }
  return true;
}

// Triangle wave with slope +-1 and kinks at multiples of period/2; range
// [-period/4, period/4], minimum at t = 0.
double tri_wave(double t, double period) {
  double u = std::fmod(t, period);
  if (u < 0.0) u += period;
  return period / 4.0 - std::abs(u - period / 2.0);
}

struct RegionContext {
  std::vector<std::size_t> movable;
  std::vector<double> dist;  // space distance to the fixed set, per movable vertex
  std::vector<std::size_t> candidates;
};

// Movable vertices: incident only to region cells and off the domain boundary.
// Distance = lattice BFS steps to the fixed set, scaled by the smallest mesh
// width, so clamping by it keeps the cutoff slope bounded.
RegionContext build_context(const SimplicialGrid& g, const std::vector<std::size_t>& region) {
  RegionContext ctx;
  std::vector<bool> in_region(g.cell_count(), false);
  for (const std::size_t c : region) in_region[c] = true;

  std::vector<char> state(g.vertex_count(), 0);  // 1 = candidate, 2 = blocked
  const int d = g.dim();
  for (const std::size_t c : region) {
    for (int k = 0; k <= d; ++k) state[g.cell_vertex(c, k)] |= 1;
  }
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (in_region[c]) continue;
    for (int k = 0; k <= d; ++k) state[g.cell_vertex(c, k)] |= 2;
  }

  double h_min = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < d; ++axis) h_min = std::min(h_min, g.h(axis));

  std::vector<int> steps(g.vertex_count(), -1);
  std::deque<std::size_t> queue;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (!(state[v] & 1)) continue;
    ctx.candidates.push_back(v);
    if ((state[v] & 2) || g.is_boundary_vertex(v)) {
      steps[v] = 0;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    const std::array<int, 4> lat = g.vertex_lattice(v);
    for (int axis = 0; axis < d; ++axis) {
      for (const int dir : {-1, +1}) {
        std::array<int, 4> nb = lat;
        nb[static_cast<std::size_t>(axis)] += dir;
        if (nb[static_cast<std::size_t>(axis)] < 0 || nb[static_cast<std::size_t>(axis)] > g.n())
          continue;
        const std::size_t w = g.vertex_at(nb);
        if (!(state[w] & 1) || steps[w] >= 0) continue;
        steps[w] = steps[v] + 1;
        queue.push_back(w);
      }
    }
  }

  for (const std::size_t v : ctx.candidates) {
    if (steps[v] != 0) {
      ctx.movable.push_back(v);
      // Unreached vertices sit in a region without fixed neighbors; treat as free.
      const double s = steps[v] > 0 ? static_cast<double>(steps[v])
                                    : static_cast<double>(g.n());
      ctx.dist.push_back(s * h_min);
    }
  }
  return ctx;
}

// One sawtooth displacement a * clamp(tri(b.x)) over the movable vertices.
void apply_wave(PiecewiseAffineMap& map, const RegionContext& ctx, const std::vector<double>& a,
                const std::vector<double>& b, double period_arg, double t_origin) {
  const SimplicialGrid& g = map.grid();
  const int d = g.dim();
  double b_norm = 0.0;
  for (const double x : b) b_norm += x * x;
  b_norm = std::sqrt(b_norm);
  for (std::size_t idx = 0; idx < ctx.movable.size(); ++idx) {
    const std::size_t v = ctx.movable[idx];
    const std::array<double, 4> x = g.vertex_coords(v);
    double t = -t_origin;
    for (int i = 0; i < d; ++i) t += b[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    const double cap = b_norm * ctx.dist[idx];
    const double amp = std::clamp(tri_wave(t, period_arg), -cap, cap);
    double* val = map.value(v);
    for (int i = 0; i < d; ++i) val[i] += a[static_cast<std::size_t>(i)] * amp;
  }
}

struct WavePlan {
  std::vector<double> a, b;
  double period_arg = 0.0;
  double t_origin = 0.0;
};

// Period selection in wave-argument units; snapped to an even number of
// lattice planes when the normal is axis-aligned so interfaces land on cell
// faces exactly. Returns false when the direction carries no oscillation.
bool plan_wave(const SimplicialGrid& g, const RegionContext& ctx, const Matrix& direction,
               double periods, int depth, WavePlan& plan) {
  if (!rank_one_factors(direction, plan.a, plan.b)) return false;
  const int d = g.dim();

  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -t_min;
  for (const std::size_t v : ctx.candidates) {
    const std::array<double, 4> x = g.vertex_coords(v);
    double t = 0.0;
    for (int i = 0; i < d; ++i)
      t += plan.b[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
  }
  if (!(t_max > t_min)) return false;
  double period = (t_max - t_min) / periods;

  int axis = -1;
  double b_norm = 0.0;
  for (int i = 0; i < d; ++i) {
    const double c = plan.b[static_cast<std::size_t>(i)];
    b_norm += c * c;
  }
  b_norm = std::sqrt(b_norm);
  for (int i = 0; i < d; ++i) {
    if (std::abs(plan.b[static_cast<std::size_t>(i)]) >= (1.0 - 1e-12) * b_norm) axis = i;
  }

  if (axis >= 0) {
    const double plane = g.h(axis) * std::abs(plan.b[static_cast<std::size_t>(axis)]);
    if (period < 2.0 * plane * (1.0 - 1e-9)) {
      throw ResolutionExhaustedError(
          "oscillation period below 2 cells at depth " + std::to_string(depth), depth);
    }
    const double half = std::max(1.0, std::round(period / (2.0 * plane)));
    period = 2.0 * half * plane;
  } else {
    double h_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) h_min = std::min(h_min, g.h(i));
    if (period < 2.0 * h_min * b_norm * (1.0 - 1e-9)) {
      throw ResolutionExhaustedError(
          "oscillation period below 2 cells at depth " + std::to_string(depth), depth);
    }
  }
  plan.period_arg = period;
  plan.t_origin = t_min;
  return true;
}

// Directions of the step's elementary binary oscillations.
std::vector<Matrix> step_directions(const SplitStep& step) {
  std::vector<Matrix> dirs;
  if (step.case_tag == CaseTag::kCaseOne) {
    const Matrix mid = 0.5 * step.children[0].matrix + 0.5 * step.children[1].matrix;
    dirs.push_back(mid - step.parent);
    dirs.push_back(0.5 * step.children[0].matrix + (-0.5) * step.children[1].matrix);
  } else {
    dirs.push_back(step.children[0].matrix - step.parent);
  }
  return dirs;
}

void apply_step(PiecewiseAffineMap& map, const std::vector<std::size_t>& cells,
                const SplitStep& step, double periods) {
  if (cells.empty()) return;
  const RegionContext ctx = build_context(map.grid(), cells);
  for (const Matrix& direction : step_directions(step)) {
    WavePlan plan;
    if (!plan_wave(map.grid(), ctx, direction, periods, step.depth, plan)) continue;
    apply_wave(map, ctx, plan.a, plan.b, plan.period_arg, plan.t_origin);
  }
}

}  // namespace

int feasible_depth(double extent_cells, int N, int freq_ratio) {
  int depth = -1;
  double denom = N;
  while (extent_cells / denom >= 2.0 && depth < 62) {
    ++depth;
    denom *= freq_ratio;
  }
  return depth;
}

RealizeStats gradient_fractions(const PiecewiseAffineMap& map,
                                const std::vector<std::size_t>& region,
                                const std::vector<Matrix>& targets, double tol) {
  RealizeStats stats;
  stats.fractions.assign(targets.size(), 0.0);
  if (region.empty()) return stats;
  const double share = 1.0 / static_cast<double>(region.size());
  for (const std::size_t c : region) {
    const Matrix grad = map.gradient(c);
    bool matched = false;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (frobenius_distance(grad, targets[i]) <= tol * (1.0 + frobenius_norm(targets[i]))) {
        stats.fractions[i] += share;
        matched = true;
        break;
      }
    }
    if (!matched) stats.off_fraction += share;
  }
  return stats;
}

RealizeStats realize_split(PiecewiseAffineMap& map, const std::vector<std::size_t>& region,
                           const SplitStep& step, int N) {
  if (N < 2) throw ValidationError("realize_split needs N >= 2");
  if (region.empty()) throw ValidationError("realize_split needs a nonempty region");
  const double scale = 1.0 + frobenius_norm(step.parent);
  for (const std::size_t c : region) {
    if (frobenius_distance(map.gradient(c), step.parent) > 1e-9 * scale) {
      throw ValidationError("realize_split precondition: region gradient != step parent");
    }
  }
  apply_step(map, region, step, static_cast<double>(N));

  std::vector<Matrix> targets;
  for (const SplitChild& c : step.children) targets.push_back(c.matrix);
  return gradient_fractions(map, region, targets, kMatchTol);
}

RealizeStats realize_laminate(PiecewiseAffineMap& map, const std::vector<std::size_t>& region,
                              const DiscreteLaminate& nu, int N, int freq_ratio) {
  if (N < 2) throw ValidationError("realize_laminate needs N >= 2");
  if (freq_ratio < 2) throw ValidationError("realize_laminate needs freq_ratio >= 2");
  if (region.empty()) throw ValidationError("realize_laminate needs a nonempty region");
  const double scale = 1.0 + frobenius_norm(nu.root);
  for (const std::size_t c : region) {
    if (frobenius_distance(map.gradient(c), nu.root) > 1e-9 * scale) {
      throw ValidationError("realize_laminate precondition: region gradient != laminate root");
    }
  }

  std::vector<Matrix> targets;
  for (const Atom& a : nu.atoms) targets.push_back(a.matrix);
  if (nu.is_dirac()) return gradient_fractions(map, region, targets, kMatchTol);

  std::vector<std::size_t> matched;
  for (const SplitStep& step : nu.tree) {
    matched.clear();
    const double tol = kMatchTol * (1.0 + frobenius_norm(step.parent));
    for (const std::size_t c : region) {
      if (frobenius_distance(map.gradient(c), step.parent) <= tol) matched.push_back(c);
    }
    const double periods =
        static_cast<double>(N) * std::pow(static_cast<double>(freq_ratio), step.depth);
    apply_step(map, matched, step, periods);
  }
  return gradient_fractions(map, region, targets, kMatchTol);
}

}  // namespace lamforge
