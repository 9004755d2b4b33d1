#include "lamforge/laminate.hpp"

#include <cmath>
#include <string>

#include "lamforge/errors.hpp"

namespace lamforge {

namespace {

constexpr int kMaxDepth = 60;

double signed_tail_product(const SignedSVD& s) {
  double prod = 1.0;
  for (std::size_t i = 2; i < s.diag.size(); ++i) prod *= s.diag[i];
  return prod;
}

}  // namespace

Dyadic DiscreteLaminate::bad_mass() const {
  Dyadic m;
  for (const Atom& a : atoms)
    if (a.role == AtomRole::kBad) m = m + a.weight;
  return m;
}

Matrix DiscreteLaminate::barycenter() const {
  Matrix b(root.dim());
  for (const Atom& a : atoms) b += a.weight.to_double() * a.matrix;
  return b;
}

CaseTag classify_case(const SignedSVD& s, double rate) {
  const int d = static_cast<int>(s.diag.size());
  double det = 1.0;
  for (double v : s.diag) det *= v;
  // Either branch bounds gamma by C |rate - det|^(1/d); the second admits
  // matrices that already sit close to the target rate.
  const double base = std::min(std::abs(rate), std::abs(rate - det)) / 2.0;
  const double threshold = std::pow(base, static_cast<double>(d - 2) / static_cast<double>(d));
  return s.tail_product() >= threshold ? CaseTag::kCaseOne : CaseTag::kCaseTwo;
}

double split_rank_one_defect(const SplitStep& step) {
  double worst = 0.0;
  if (step.case_tag == CaseTag::kCaseTwo) {
    for (const SplitChild& c : step.children) {
      worst = std::max(worst, rank_one_defect(c.matrix - step.parent));
    }
    return worst;
  }
  // Children are ordered (+,+), (+,-), (-,+), (-,-) in the two shear signs, so
  // consecutive pairs share the first-leg midpoint.
  for (std::size_t pair = 0; pair + 1 < step.children.size(); pair += 2) {
    const Matrix& c0 = step.children[pair].matrix;
    const Matrix& c1 = step.children[pair + 1].matrix;
    const Matrix mid = 0.5 * c0 + 0.5 * c1;
    worst = std::max(worst, rank_one_defect(mid - step.parent));
    worst = std::max(worst, rank_one_defect(c0 - mid));
    worst = std::max(worst, rank_one_defect(c1 - mid));
  }
  return worst;
}

SplitStep split_case_one(const SignedSVD& s, double rate) {
  const Matrix parent = s.diag_matrix();
  const int d = parent.dim();
  const double det_parent = determinant(parent);
  const double mismatch = std::abs(rate - det_parent);
  const double tail = s.tail_product();
  const double gamma = mismatch == 0.0 ? 0.0 : std::sqrt(mismatch / tail);

  SplitStep step;
  step.parent = parent;
  step.case_tag = CaseTag::kCaseOne;
  step.magnitude = gamma;
  step.children.reserve(4);

  // det(child) = det_parent - ab * gamma^2 * (signed tail), so one sign pairing
  // hits the rate exactly; label by evaluating the determinants directly.
  const double signed_tail = signed_tail_product(s);
  const double det_same = det_parent - gamma * gamma * signed_tail;
  const double det_opp = det_parent + gamma * gamma * signed_tail;
  const bool same_is_good = std::abs(det_same - rate) <= std::abs(det_opp - rate);

  for (const int a : {+1, -1}) {
    for (const int b : {+1, -1}) {
      Matrix child = parent;
      child(0, 1) += a * gamma;
      child(1, 0) += b * gamma;
      AtomRole role;
      if (gamma == 0.0) {
        role = AtomRole::kGood;
      } else {
        role = ((a * b > 0) == same_is_good) ? AtomRole::kGood : AtomRole::kBad;
      }
      step.children.push_back({Dyadic::pow2(2), child, role});
    }
  }
  (void)d;
  return step;
}

SplitStep split_case_two(const SignedSVD& s, double rate) {
  const int d = static_cast<int>(s.diag.size());
  if (rate == 0.0) {
    // Threshold (0/2)^((d-2)/d) = 0 forces case one; reaching here is a logic error.
    throw RuntimeError("split_case_two invoked with rate 0");
  }
  if (d < 3) throw RuntimeError("split_case_two requires d >= 3");
  const Matrix parent = s.diag_matrix();
  const double delta = 2.0 * std::pow(std::abs(rate) / 2.0, 1.0 / static_cast<double>(d));

  SplitStep step;
  step.parent = parent;
  step.case_tag = CaseTag::kCaseTwo;
  step.magnitude = delta;
  for (const int sign : {+1, -1}) {
    Matrix child = parent;
    child(2, 2) += sign * delta;
    step.children.push_back({Dyadic::pow2(1), child, AtomRole::kContinue});
  }
  return step;
}

SplitStep conjugate(const SplitStep& step, const Matrix& p, const Matrix& q) {
  SplitStep out = step;
  const Matrix qt = q.transposed();
  out.parent = matmul(matmul(p, step.parent), qt);
  for (std::size_t i = 0; i < step.children.size(); ++i) {
    out.children[i].matrix = matmul(matmul(p, step.children[i].matrix), qt);
  }
  return out;
}

namespace {

class LaminateBuilder {
 public:
  LaminateBuilder(double rate, int depth, int dim)
      : rate_(rate), depth_(depth), case_two_cap_(dim - 2) {}

  void expand(const Matrix& m, const Dyadic& weight, int levels_done, int case_two_run,
              DiscreteLaminate& out) {
    const double det = determinant(m);
    if (det == rate_) {
      out.atoms.push_back({weight, m, AtomRole::kGood});
      return;
    }
    if (levels_done == depth_) {
      out.atoms.push_back({weight, m, AtomRole::kBad});
      return;
    }
    const SignedSVD s = signed_svd(m);
    if (classify_case(s, rate_) == CaseTag::kCaseTwo) {
      if (case_two_run >= case_two_cap_) {
        throw RuntimeError("case two prefix exceeded " + std::to_string(case_two_cap_) +
                           " consecutive splits");
      }
      SplitStep step = conjugate(split_case_two(s, rate_), s.p, s.q);
      step.depth = levels_done;
      for (SplitChild& c : step.children) c.weight = weight.shifted(1);
      const std::vector<SplitChild> children = step.children;
      out.tree.push_back(std::move(step));
      for (const SplitChild& c : children) {
        expand(c.matrix, c.weight, levels_done, case_two_run + 1, out);
      }
      return;
    }
    SplitStep step = conjugate(split_case_one(s, rate_), s.p, s.q);
    step.depth = levels_done;
    for (SplitChild& c : step.children) c.weight = weight.shifted(2);
    const std::vector<SplitChild> children = step.children;
    out.tree.push_back(std::move(step));
    for (const SplitChild& c : children) {
      if (c.role == AtomRole::kGood) {
        out.atoms.push_back({c.weight, c.matrix, AtomRole::kGood});
      } else {
        expand(c.matrix, c.weight, levels_done + 1, 0, out);
      }
    }
  }

 private:
  double rate_;
  int depth_;
  int case_two_cap_;
};

}  // namespace

DiscreteLaminate build_laminate(const Matrix& m, double rate, int k, const BuildOptions& opts) {
  validate(m);
  if (!std::isfinite(rate)) throw ValidationError("laminate rate must be finite");
  if (opts.bad_mass_tol) {
    const double tol = *opts.bad_mass_tol;
    if (!(tol > 0.0 && tol <= 1.0)) throw ValidationError("bad_mass_tol must lie in (0,1]");
    k = 0;
    while (std::exp2(-static_cast<double>(k)) > tol && k <= kMaxDepth) ++k;
  }
  if (k < 0) throw ValidationError("laminate depth must be nonnegative");
  if (k > kMaxDepth) {
    throw ValidationError("laminate depth " + std::to_string(k) + " exceeds cap " +
                          std::to_string(kMaxDepth) + " (dyadic weight underflow)");
  }

  DiscreteLaminate out;
  out.root = m;
  out.rate = rate;
  out.case_one_depth = k;
  LaminateBuilder builder(rate, k, m.dim());
  builder.expand(m, Dyadic::one(), 0, 0, out);
  return out;
}

double clamp_rate(double t, double j1, double j2) {
  if (std::isnan(j1) || std::isnan(j2) || j1 > j2) {
    throw ValidationError("clamp_rate requires J1 <= J2");
  }
  if (t < j1) return j1;
  if (t > j2) return j2;
  return t;
}

DiscreteLaminate laminate_for_constraint(const Matrix& m, const PointwiseConstraint& constraint,
                                         int k, const BuildOptions& opts) {
  if (constraint.kind == ConstraintKind::kExact) {
    return build_laminate(m, constraint.rate, k, opts);
  }
  const double rate = clamp_rate(determinant(m), constraint.j1, constraint.j2);
  return build_laminate(m, rate, k, opts);
}

}  // namespace lamforge
