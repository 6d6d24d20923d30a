#include "dcforge/transforms.hpp"

#include "dcforge/errors.hpp"

namespace dcforge {

const char* to_string(LiftKind kind) {
  switch (kind) {
    case LiftKind::basic:
      return "basic";
    case LiftKind::convex_constrained:
      return "convex_constrained";
    case LiftKind::dc_constrained:
      return "dc_constrained";
  }
  return "basic";
}

namespace {

// t - g(x) with the curvature the DC structure guarantees.
SmoothFn t_minus(const SmoothFn& g, int total, int t_index) {
  Vector e = Vector::Zero(total);
  e[t_index] = 1.0;
  const SmoothFn out = SmoothFn::affine(e) - g.embedded(total, 0);
  return out.with_curvature(g.is_affine() ? Curvature::affine : Curvature::concave);
}

// f(x) - t, convex.
SmoothFn minus_t(const SmoothFn& f, int total, int t_index) {
  Vector e = Vector::Zero(total);
  e[t_index] = -1.0;
  const SmoothFn out = f.embedded(total, 0) + SmoothFn::affine(e);
  return out.with_curvature(f.is_affine() ? Curvature::affine : Curvature::convex);
}

}  // namespace

Vector EpigraphLift::embed(const Vector& x) const {
  if (x.size() != base_dim()) throw DimensionMismatch("embed: dimension mismatch");
  Vector w(lifted_dim());
  w.head(base_dim()) = x;
  w[base_dim()] = base_.f.value(x);
  for (std::size_t i = 0; i < base_.constraints.size(); ++i) {
    w[base_dim() + 1 + static_cast<Eigen::Index>(i)] = base_.constraints[i].f.value(x);
  }
  return w;
}

bool EpigraphLift::is_feasible(const Vector& w, double tol) const {
  if (!contains(w, tol)) return false;
  for (const auto& p : psis_) {
    if (p.value(w) > tol) return false;
  }
  return true;
}

EpigraphLift make_lift(const DCProblem& p, LiftKind kind) {
  const int n = p.dim();
  const bool whole = p.domain.kind() == DomainKind::whole_space;
  switch (kind) {
    case LiftKind::basic:
      if (!p.constraints.empty()) throw HasConstraints("lift_basic: problem has DC constraints");
      if (!whole) throw UnsupportedDomain("lift_basic: needs a whole-space domain; use lift_convex_constrained");
      break;
    case LiftKind::convex_constrained:
      if (!p.constraints.empty()) throw HasConstraints("lift_convex_constrained: problem has DC constraints");
      if (whole) throw UnsupportedDomain("lift_convex_constrained: domain is the whole space; use lift_basic");
      break;
    case LiftKind::dc_constrained:
      if (p.constraints.empty()) throw NoConstraints("lift_dc_constrained: problem has no DC constraints");
      break;
  }
  const int m = static_cast<int>(p.constraints.size());
  const int total = n + 1 + m;
  FeasibleRegion region{total, p.domain, {}, {}};
  region.convex_constraints.push_back(minus_t(p.f, total, n));
  std::vector<SmoothFn> psis;
  for (int i = 0; i < m; ++i) {
    const auto& c = p.constraints[static_cast<std::size_t>(i)];
    region.convex_constraints.push_back(minus_t(c.f, total, n + 1 + i));
    psis.push_back(t_minus(c.g, total, n + 1 + i));
  }
  return EpigraphLift(p, kind, t_minus(p.g, total, n), std::move(region), std::move(psis));
}

EpigraphLift lift_basic(const DCProblem& p) { return make_lift(p, LiftKind::basic); }
EpigraphLift lift_convex_constrained(const DCProblem& p) { return make_lift(p, LiftKind::convex_constrained); }
EpigraphLift lift_dc_constrained(const DCProblem& p) { return make_lift(p, LiftKind::dc_constrained); }

EpigraphLift make_lift(const DCProblem& p) {
  if (!p.constraints.empty()) return lift_dc_constrained(p);
  if (p.domain.kind() == DomainKind::whole_space) return lift_basic(p);
  return lift_convex_constrained(p);
}

}  // namespace dcforge
