#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "dcforge/analysis.hpp"
#include "dcforge/errors.hpp"
#include "dcforge/solvers.hpp"

namespace dcforge {

const char* to_string(StepKind kind) {
  switch (kind) {
    case StepKind::unit:
      return "unit";
    case StepKind::harmonic:
      return "harmonic";
    case StepKind::greedy:
      return "greedy";
    case StepKind::custom:
      return "custom";
  }
  return "unit";
}

const char* to_string(InnerStatus status) {
  switch (status) {
    case InnerStatus::converged:
      return "converged";
    case InnerStatus::max_iters:
      return "max_iters";
    case InnerStatus::unbounded:
      return "unbounded";
  }
  return "converged";
}

StepRule parse_step_rule(const std::string& name) {
  if (name == "unit") return StepRule::unit();
  if (name == "harmonic") return StepRule::harmonic();
  if (name == "greedy" || name == "greedy_linesearch") return StepRule::greedy();
  throw std::invalid_argument("unknown step rule '" + name + "' (expected unit, harmonic or greedy)");
}

namespace {

double golden_section(const std::function<double(double)>& h) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double hc = h(c), hd = h(d);
  for (int it = 0; it < 60; ++it) {
    if (hc <= hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - inv_phi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + inv_phi * (b - a);
      hd = h(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double StepRule::step(int k, const SmoothFn& phi, const Vector& w, const Vector& s) const {
  switch (kind) {
    case StepKind::unit:
      return 1.0;
    case StepKind::harmonic:
      return 2.0 / (static_cast<double>(k) + 1.0);
    case StepKind::custom: {
      if (!schedule) throw std::invalid_argument("custom step rule without a schedule");
      const double eta = schedule(k);
      if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("custom step outside [0, 1]");
      return eta;
    }
    case StepKind::greedy:
      break;
  }
  const Vector d = s - w;
  if (d.squaredNorm() == 0.0) return 1.0;
  if (const auto& q = phi.quadratic_form()) {
    const double slope = phi.grad(w).dot(d);
    const double curv = d.dot(q->hessian * d);
    if (curv > 0.0) return std::clamp(-slope / curv, 0.0, 1.0);
    return slope + 0.5 * curv <= 0.0 ? 1.0 : 0.0;
  }
  auto h = [&](double eta) {
    const double v = phi.value(w + eta * d);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  const double eta_g = golden_section(h);
  // Endpoints are compared explicitly; ties go to the longer step, so a concave
  // restriction with non-positive slope returns exactly 1.
  const double h0 = h(0.0), hg = h(eta_g), h1 = h(1.0);
  if (h1 <= hg && h1 <= h0) return 1.0;
  if (hg <= h0) return eta_g;
  return 0.0;
}

void SolveConfig::validate() const {
  if (max_outer_iters <= 0) throw std::invalid_argument("max_outer_iters must be positive");
  if (!(gap_tol >= 0.0)) throw std::invalid_argument("gap_tol must be >= 0");
  if (!(eps_inner > 0.0)) throw std::invalid_argument("eps_inner must be > 0");
  if (inner_max_iters <= 0) throw std::invalid_argument("inner_max_iters must be positive");
  if (!(barrier_mu0 > 0.0)) throw std::invalid_argument("barrier_mu0 must be > 0");
  if (!(barrier_shrink > 0.0 && barrier_shrink < 1.0)) throw std::invalid_argument("barrier_shrink must lie in (0, 1)");
  if (!(unbounded_norm_threshold > 0.0)) throw std::invalid_argument("unbounded_norm_threshold must be > 0");
  if (step_rule.kind == StepKind::custom && !step_rule.schedule) {
    throw std::invalid_argument("custom step rule needs a schedule");
  }
}

FeasibleRegion FeasibleRegion::of(const Domain& domain) { return FeasibleRegion{domain.dim(), domain, {}, {}}; }

bool FeasibleRegion::contains(const Vector& w, double tol) const {
  if (w.size() != dim) return false;
  if (!domain.contains(w.head(domain.dim()), tol)) return false;
  return !(max_violation(w) > tol);
}

double FeasibleRegion::max_violation(const Vector& w) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& lc : linear_constraints) worst = std::max(worst, lc.value(w));
  for (const auto& c : convex_constraints) {
    const double v = c.value(w);
    worst = std::max(worst, std::isnan(v) ? std::numeric_limits<double>::infinity() : v);
  }
  return worst;
}

bool FeasibleRegion::is_geometric() const {
  return linear_constraints.empty() && convex_constraints.empty() && domain.dim() == dim;
}

std::optional<double> IterateTrace::gap(std::size_t i) const {
  const auto& r = records.at(i);
  return r.fw_gap ? r.fw_gap : r.dc_gap;
}

namespace {

using Clock = std::chrono::steady_clock;

InnerSolveReport require_converged(InnerSolveReport rep, const char* algorithm, int k) {
  switch (rep.status) {
    case InnerStatus::converged:
      return rep;
    case InnerStatus::unbounded:
      throw Unbounded(fmt::format("{}: subproblem at iteration {} is unbounded below ({})", algorithm, k, rep.method));
    case InnerStatus::max_iters:
      break;
  }
  throw MaxIters(fmt::format("{}: inner solve at iteration {} stopped at residual {:.3e} ({})", algorithm, k,
                             rep.residual, rep.method));
}

void finish_record(IterateTrace& trace, IterateRecord rec, const SolveConfig& cfg, Clock::time_point started) {
  if (cfg.record_wall_time) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();
  }
  const auto gap = rec.fw_gap ? rec.fw_gap : rec.dc_gap;
  if (gap && (!trace.best_gap || *gap < *trace.best_gap)) {
    trace.best_gap = gap;
    trace.best_gap_index = rec.k;
  }
  trace.records.push_back(std::move(rec));
}

bool gap_reached(const SolveConfig& cfg, double gap) { return cfg.gap_tol > 0.0 && gap <= cfg.gap_tol; }

constexpr double kStartTol = 1e-8;

}  // namespace

IterateTrace fw_solve(const SmoothFn& phi, const FeasibleRegion& region, const Vector& w1, const SolveConfig& cfg) {
  cfg.validate();
  if (phi.dim() != region.dim || w1.size() != region.dim) throw DimensionMismatch("fw_solve: dimension mismatch");
  if (!region.contains(w1, kStartTol)) throw InfeasibleStart("fw_solve: start point is outside the feasible region");
  IterateTrace trace;
  trace.algorithm = "fw";
  Vector w = w1;
  for (int k = 1; k <= cfg.max_outer_iters; ++k) {
    const auto started = Clock::now();
    const Vector g = phi.grad(w);
    const ConvexSubproblem sp{SmoothFn::affine(g), region.domain, region.linear_constraints,
                              region.convex_constraints};
    const InnerSolveReport rep = require_converged(inner_convex_solve(sp, w, cfg), "fw", k);
    const Vector& s = rep.x_star;
    const double gap = g.dot(w - s);
    const double eta = cfg.step_rule.step(k, phi, w, s);

    IterateRecord rec;
    rec.k = k;
    rec.iterate = w;
    rec.objective = phi.value(w);
    rec.fw_gap = gap;
    rec.step = eta;
    rec.inner_iters = rep.iterations;
    if (!region.convex_constraints.empty() || !region.linear_constraints.empty()) {
      rec.feas_max = region.max_violation(w);
    }
    finish_record(trace, std::move(rec), cfg, started);
    if (gap_reached(cfg, gap)) {
      trace.status = TraceStatus::gap_tol;
      trace.final_iterate = w;
      return trace;
    }
    w = eta == 1.0 ? s : Vector(w + eta * (s - w));
  }
  trace.final_iterate = w;
  return trace;
}

IterateTrace fw_solve(const SmoothFn& phi, const Domain& domain, const Vector& w1, const SolveConfig& cfg) {
  return fw_solve(phi, FeasibleRegion::of(domain), w1, cfg);
}

FwPlusMode fw_plus_mode(const SmoothFn& phi, const std::vector<SmoothFn>& psis) {
  const bool concave = is_concave(phi.curvature()) &&
                       std::all_of(psis.begin(), psis.end(), [](const SmoothFn& p) { return is_concave(p.curvature()); });
  if (concave) return FwPlusMode::concave;
  const bool convex = is_convex(phi.curvature()) &&
                      std::all_of(psis.begin(), psis.end(), [](const SmoothFn& p) { return is_convex(p.curvature()); });
  if (convex) return FwPlusMode::convex;
  std::string tags = fmt::format("phi {}", to_string(phi.curvature()));
  for (const auto& p : psis) tags += fmt::format(", psi {}", to_string(p.curvature()));
  throw MixedCurvature("fw_plus_solve: objective and constraints must be all concave or all convex (" + tags + ")");
}

IterateTrace fw_plus_solve(const SmoothFn& phi, const FeasibleRegion& region, const std::vector<SmoothFn>& psis,
                           const Vector& w1, const SolveConfig& cfg) {
  cfg.validate();
  const FwPlusMode mode = fw_plus_mode(phi, psis);
  if (phi.dim() != region.dim || w1.size() != region.dim) throw DimensionMismatch("fw_plus_solve: dimension mismatch");
  for (const auto& p : psis) {
    if (p.dim() != region.dim) throw DimensionMismatch("fw_plus_solve: constraint dimension mismatch");
  }
  if (!region.contains(w1, kStartTol)) throw InfeasibleStart("fw_plus_solve: start point is outside the region");
  if (mode == FwPlusMode::concave) {
    for (const auto& p : psis) {
      if (p.value(w1) > kStartTol) throw InfeasibleStart("fw_plus_solve: start point violates a constraint");
    }
  }
  const StepRule rule = mode == FwPlusMode::concave ? StepRule::unit() : StepRule::harmonic();

  IterateTrace trace;
  trace.algorithm = "fw_plus";
  Vector w = w1;
  for (int k = 1; k <= cfg.max_outer_iters; ++k) {
    const auto started = Clock::now();
    const Vector g = phi.grad(w);
    ConvexSubproblem sp{SmoothFn::affine(g), region.domain, region.linear_constraints, region.convex_constraints};
    Vector psi_values(static_cast<Eigen::Index>(psis.size()));
    for (std::size_t i = 0; i < psis.size(); ++i) {
      const double v = psis[i].value(w);
      const Vector gp = psis[i].grad(w);
      psi_values[static_cast<Eigen::Index>(i)] = v;
      sp.linear_constraints.push_back({gp, gp.dot(w) - v});
    }
    const InnerSolveReport rep = require_converged(inner_convex_solve(sp, w, cfg), "fw_plus", k);
    const Vector& s = rep.x_star;
    const double gap = g.dot(w - s);
    const double eta = rule.step(k, phi, w, s);

    IterateRecord rec;
    rec.k = k;
    rec.iterate = w;
    rec.objective = phi.value(w);
    rec.fw_gap = gap;
    rec.step = eta;
    rec.inner_iters = rep.iterations;
    rec.constraint_values = psi_values;
    if (psi_values.size() > 0) rec.feas_max = psi_values.maxCoeff();
    finish_record(trace, std::move(rec), cfg, started);
    if (gap_reached(cfg, gap)) {
      trace.status = TraceStatus::gap_tol;
      trace.final_iterate = w;
      return trace;
    }
    w = eta == 1.0 ? s : Vector(w + eta * (s - w));
  }
  trace.final_iterate = w;
  return trace;
}

IterateTrace cccp_solve(const DCProblem& p, const SolveConfig& cfg) {
  cfg.validate();
  if (!p.constraints.empty()) throw HasConstraints("cccp_solve: problem has DC constraints; use cccp_plus_solve");
  p.validate();
  const bool whole = p.domain.kind() == DomainKind::whole_space;
  IterateTrace trace;
  trace.algorithm = "cccp";
  Vector x = p.x_init;
  for (int k = 1; k <= cfg.max_outer_iters; ++k) {
    const auto started = Clock::now();
    const Vector gk = p.g.grad(x);
    const ConvexSubproblem sp{p.f.plus_affine(-gk), p.domain, {}, {}};
    const InnerSolveReport rep = require_converged(inner_convex_solve(sp, x, cfg), "cccp", k);
    const Vector& xn = rep.x_star;
    const double gap = dc_gap(p, x, xn);

    IterateRecord rec;
    rec.k = k;
    rec.iterate = x;
    rec.objective = p.objective(x);
    rec.dc_gap = gap;
    rec.step = 1.0;
    rec.inner_iters = rep.iterations;
    if (whole) rec.kkt_residual = (p.f.grad(xn) - gk).norm();
    finish_record(trace, std::move(rec), cfg, started);
    if (gap_reached(cfg, gap)) {
      trace.status = TraceStatus::gap_tol;
      trace.final_iterate = x;
      return trace;
    }
    x = xn;
  }
  trace.final_iterate = x;
  return trace;
}

IterateTrace cccp_plus_solve(const DCProblem& p, const SolveConfig& cfg) {
  if (p.constraints.empty()) return cccp_solve(p, cfg);
  cfg.validate();
  p.validate();
  IterateTrace trace;
  trace.algorithm = "cccp_plus";
  Vector x = p.x_init;
  for (int k = 1; k <= cfg.max_outer_iters; ++k) {
    const auto started = Clock::now();
    const Vector gk = p.g.grad(x);
    ConvexSubproblem sp{p.f.plus_affine(-gk), p.domain, {}, {}};
    for (const auto& c : p.constraints) {
      const Vector gi = c.g.grad(x);
      sp.convex_constraints.push_back(c.f.plus_affine(-gi, gi.dot(x) - c.g.value(x)));
    }
    const InnerSolveReport rep = require_converged(inner_convex_solve(sp, x, cfg), "cccp_plus", k);
    const Vector& xn = rep.x_star;
    const double gap = dc_gap(p, x, xn);

    IterateRecord rec;
    rec.k = k;
    rec.iterate = x;
    rec.objective = p.objective(x);
    rec.dc_gap = gap;
    rec.step = 1.0;
    rec.inner_iters = rep.iterations;
    rec.constraint_values = p.constraint_values(x);
    rec.feas_max = rec.constraint_values.maxCoeff();
    finish_record(trace, std::move(rec), cfg, started);
    if (gap_reached(cfg, gap)) {
      trace.status = TraceStatus::gap_tol;
      trace.final_iterate = x;
      return trace;
    }
    x = xn;
  }
  trace.final_iterate = x;
  return trace;
}

}  // namespace dcforge
