#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "dcforge/errors.hpp"
#include "dcforge/solvers.hpp"

namespace dcforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool too_far(const Vector& x, const SolveConfig& cfg) {
  return !x.allFinite() || x.norm() > cfg.unbounded_norm_threshold;
}

InnerSolveReport make_report(Vector x, int iterations, double residual, InnerStatus status, const char* method) {
  InnerSolveReport r;
  r.x_star = std::move(x);
  r.iterations = iterations;
  r.residual = residual;
  r.status = status;
  r.method = method;
  return r;
}

// ---------------------------------------------------------------- whole space

// Solves (H + reg I) d = -g, raising reg until d is a descent direction.
Vector newton_direction(const Matrix& h, const Vector& g, double& reg) {
  const double scale = 1.0 + h.diagonal().cwiseAbs().maxCoeff();
  const auto n = g.size();
  for (int attempt = 0; attempt < 40; ++attempt) {
    const Eigen::LLT<Matrix> llt(h + reg * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      Vector d = llt.solve(-g);
      if (d.allFinite() && g.dot(d) < 0.0) return d;
    }
    reg = std::max(10.0 * reg, 1e-10 * scale);
  }
  return -g;
}

InnerSolveReport newton_unconstrained(const SmoothFn& f, const Vector& start, const SolveConfig& cfg) {
  Vector x = start;
  double fx = f.value(x);
  Vector g = f.grad(x);
  double res = g.norm();
  double reg = 0.0;
  int it = 0;
  for (; it < cfg.inner_max_iters; ++it) {
    if (too_far(x, cfg)) return make_report(x, it, res, InnerStatus::unbounded, "newton");
    if (res <= cfg.eps_inner) {
      // Two extra full Newton steps when they help; cross-method comparisons need the slack.
      for (int extra = 0; extra < 2 && res > 0.0; ++extra) {
        const Matrix h = f.hessian(x);
        double r0 = 0.0;
        const Vector xn = x + newton_direction(h, g, r0);
        const Vector gn = f.grad(xn);
        if (!(gn.norm() < res)) break;
        x = xn;
        g = gn;
        res = gn.norm();
      }
      return make_report(x, it, res, InnerStatus::converged, "newton");
    }
    const Vector d = newton_direction(f.hessian(x), g, reg);
    const double slope = g.dot(d);
    bool accepted = false;
    Vector xn;
    double fn = 0.0;
    // Below this predicted decrease, value comparisons are rounding noise.
    const bool resolvable = -slope > 1e-13 * (1.0 + std::abs(fx));
    for (double t = 1.0; resolvable && t >= 1e-12; t *= 0.5) {
      xn = x + t * d;
      fn = f.value(xn);
      if (std::isfinite(fn) && fn < fx && fn <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    Vector gn;
    if (accepted) {
      gn = f.grad(xn);
    } else {
      // Function values have hit rounding level; fall back on the gradient norm.
      for (double t = 1.0; t >= 1e-6 && !accepted; t *= 0.5) {
        xn = x + t * d;
        gn = f.grad(xn);
        fn = f.value(xn);
        accepted = std::isfinite(fn) && gn.allFinite() && gn.norm() < res;
      }
    }
    if (!accepted) return make_report(x, it, res, InnerStatus::max_iters, "newton");
    x = xn;
    fx = fn;
    g = gn;
    res = g.norm();
    reg *= 0.1;
  }
  return make_report(x, it, res, res <= cfg.eps_inner ? InnerStatus::converged : InnerStatus::max_iters, "newton");
}

InnerSolveReport solve_unconstrained(const SmoothFn& f, const Vector& start, const SolveConfig& cfg) {
  if (f.is_affine()) {
    const double res = f.grad(start).norm();
    return make_report(start, 0, res, res <= cfg.eps_inner ? InnerStatus::converged : InnerStatus::unbounded,
                       "affine");
  }
  if (const auto& q = f.quadratic_form()) {
    const Eigen::LLT<Matrix> llt(q->hessian);
    if (llt.info() == Eigen::Success) {
      Vector x = llt.solve(-q->linear);
      x -= llt.solve(q->hessian * x + q->linear);
      const double res = f.grad(x).norm();
      if (x.allFinite() && res <= cfg.eps_inner) {
        if (too_far(x, cfg)) return make_report(x, 1, res, InnerStatus::unbounded, "closed_form");
        return make_report(x, 1, res, InnerStatus::converged, "closed_form");
      }
    }
  }
  return newton_unconstrained(f, start, cfg);
}

// ---------------------------------------------------------------- domain only

Vector project_prefix(const Domain& domain, Vector x) {
  if (domain.kind() == DomainKind::whole_space) return x;
  const int d = domain.dim();
  x.head(d) = domain.project(x.head(d));
  return x;
}

InnerSolveReport solve_on_domain(const SmoothFn& f, const Domain& domain, const Vector& start,
                                 const SolveConfig& cfg) {
  const int n = f.dim();
  const int d = domain.dim();
  if (f.is_affine() && domain.has_lmo()) {
    const Vector c = f.grad(start);
    if (d < n && c.tail(n - d).norm() > 0.0) return make_report(start, 0, kInf, InnerStatus::unbounded, "lmo");
    Vector x = start;
    try {
      x.head(d) = domain.lmo(c.head(d));
    } catch (const Unbounded&) {
      return make_report(start, 0, kInf, InnerStatus::unbounded, "lmo");
    }
    return make_report(x, 1, 0.0, InnerStatus::converged, "lmo");
  }

  // Projected gradient; Barzilai-Borwein steps, halved until the step is below the
  // inverse local curvature along the move. Each accepted step decreases f.
  Vector x = project_prefix(domain, start);
  Vector g = f.grad(x);
  auto residual = [&](const Vector& v, const Vector& gv) { return (v - project_prefix(domain, v - gv)).norm(); };
  double res = residual(x, g);
  double alpha = f.lipschitz_grad() && *f.lipschitz_grad() > 0.0 ? 1.0 / *f.lipschitz_grad() : 1.0;
  int it = 0;
  for (; it < cfg.inner_max_iters; ++it) {
    if (res <= cfg.eps_inner) return make_report(x, it, res, InnerStatus::converged, "projected_gradient");
    if (too_far(x, cfg)) return make_report(x, it, res, InnerStatus::unbounded, "projected_gradient");
    bool accepted = false;
    Vector xn, gn, s;
    double ss = 0.0, sy = 0.0;
    for (int bt = 0; bt < 80; ++bt) {
      xn = project_prefix(domain, x - alpha * g);
      s = xn - x;
      ss = s.squaredNorm();
      if (ss == 0.0) break;
      gn = f.grad(xn);
      sy = s.dot(gn - g);
      if (gn.allFinite() && sy <= (ss / alpha) * (1.0 + 1e-10)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    x = xn;
    g = gn;
    res = residual(x, g);
    alpha = sy > 0.0 ? ss / sy : 2.0 * alpha;
    alpha = std::clamp(alpha, 1e-12, 1e12);
  }
  return make_report(x, it, res, res <= cfg.eps_inner ? InnerStatus::converged : InnerStatus::max_iters,
                     "projected_gradient");
}

// ---------------------------------------------------------------- barrier

struct ConstraintSet {
  std::vector<SmoothFn> ineq;  // c_j(z) <= 0
  Matrix eq;                   // eq * z = eq_rhs
  Vector eq_rhs;
};

Vector unit(int n, int i, double v = 1.0) {
  Vector e = Vector::Zero(n);
  e[i] = v;
  return e;
}

ConstraintSet build_constraints(const ConvexSubproblem& sp) {
  const int n = sp.objective.dim();
  const Domain& dom = sp.domain;
  const int d = dom.dim();
  ConstraintSet cs;
  cs.eq.resize(0, n);
  switch (dom.kind()) {
    case DomainKind::whole_space:
      break;
    case DomainKind::box:
      for (int i = 0; i < d; ++i) {
        if (std::isfinite(dom.lower()[i])) cs.ineq.push_back(SmoothFn::affine(unit(n, i, -1.0), dom.lower()[i]));
        if (std::isfinite(dom.upper()[i])) cs.ineq.push_back(SmoothFn::affine(unit(n, i), -dom.upper()[i]));
      }
      break;
    case DomainKind::simplex:
      for (int i = 0; i < d; ++i) cs.ineq.push_back(SmoothFn::affine(unit(n, i, -1.0)));
      cs.eq = Matrix::Zero(1, n);
      cs.eq.row(0).head(d).setOnes();
      cs.eq_rhs = Vector::Constant(1, dom.radius());
      break;
    case DomainKind::l2_ball: {
      const Vector& c = dom.center();
      const double r = dom.radius();
      cs.ineq.push_back(
          SmoothFn::quadratic(2.0 * Matrix::Identity(d, d), -2.0 * c, c.squaredNorm() - r * r).embedded(n, 0));
      break;
    }
    case DomainKind::vertex_polytope:
      throw UnsupportedDomain("constrained subproblems over vertex polytopes are not supported");
  }
  for (const auto& lc : sp.linear_constraints) {
    if (lc.normal.size() != n) throw DimensionMismatch("linear constraint dimension mismatch");
    cs.ineq.push_back(SmoothFn::affine(lc.normal, -lc.offset));
  }
  for (const auto& c : sp.convex_constraints) {
    if (c.dim() != n) throw DimensionMismatch("convex constraint dimension mismatch");
    cs.ineq.push_back(c);
  }
  return cs;
}

double max_constraint(const std::vector<SmoothFn>& ineq, const Vector& z) {
  double worst = -kInf;
  for (const auto& c : ineq) {
    const double v = c.value(z);
    worst = std::max(worst, std::isnan(v) ? kInf : v);
  }
  return worst;
}

// Solves the symmetric (possibly singular) KKT system for the step.
Vector kkt_solve(const Matrix& h, const Matrix& e, const Vector& rhs_top, int n) {
  const auto p = e.rows();
  if (p == 0) {
    const double reg = 1e-12 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
    const Eigen::LLT<Matrix> llt(h + reg * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success) return llt.solve(rhs_top);
    return h.completeOrthogonalDecomposition().solve(rhs_top);
  }
  Matrix k = Matrix::Zero(n + p, n + p);
  k.topLeftCorner(n, n) = h;
  k.topRightCorner(n, p) = e.transpose();
  k.bottomLeftCorner(p, n) = e;
  Vector rhs = Vector::Zero(n + p);
  rhs.head(n) = rhs_top;
  return k.completeOrthogonalDecomposition().solve(rhs).head(n);
}

enum class CenterResult { ok, unbounded, budget };

// Damped Newton on B(z) = f(z) - mu sum log(-c_j(z)) keeping E z fixed.
CenterResult center(const SmoothFn& f, const std::vector<SmoothFn>& ineq, const Matrix& eq, double mu, Vector& z,
                    int& iterations, const SolveConfig& cfg,
                    const std::function<bool(const Vector&)>& early_exit = {}) {
  const auto n = static_cast<int>(z.size());
  auto barrier_value = [&](const Vector& v) {
    double b = f.value(v);
    for (const auto& c : ineq) {
      const double cv = c.value(v);
      if (!(cv < 0.0)) return kInf;
      b -= mu * std::log(-cv);
    }
    return std::isfinite(b) ? b : kInf;
  };
  double bz = barrier_value(z);
  double last_dec = kInf;
  int stalls = 0;
  for (int local = 0; local < 500; ++local) {
    if (iterations >= cfg.inner_max_iters) return CenterResult::budget;
    ++iterations;
    Vector grad = f.grad(z);
    Matrix h = f.hessian(z);
    for (const auto& c : ineq) {
      const double slack = -c.value(z);
      const Vector gc = c.grad(z);
      grad += (mu / slack) * gc;
      h.noalias() += (mu / (slack * slack)) * gc * gc.transpose();
      if (!c.is_affine()) h += (mu / slack) * c.hessian(z);
    }
    const Vector dz = kkt_solve(h, eq, -grad, n);
    const double dec = -grad.dot(dz);
    if (!dz.allFinite() || !(dec > 0.0)) return CenterResult::ok;
    if (dec <= 1e-30 * (1.0 + std::abs(bz))) return CenterResult::ok;
    bool accepted = false;
    Vector zn;
    double bn = kInf;
    for (double t = 1.0; t >= 1e-16; t *= 0.5) {
      zn = z + t * dz;
      bn = barrier_value(zn);
      if (!std::isfinite(bn)) continue;
      // Inside the quadratic-convergence region the full step is taken without a
      // value test, which would otherwise stall on rounding of f.
      if ((t == 1.0 && dec < 1e-2) || bn <= bz - 0.01 * t * dec) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return CenterResult::ok;
    z = zn;
    bz = bn;
    if (too_far(z, cfg)) return CenterResult::unbounded;
    if (early_exit && early_exit(z)) return CenterResult::ok;
    if (dec < 1e-16 && dec > 0.25 * last_dec) {
      if (++stalls >= 3) return CenterResult::ok;
    }
    last_dec = dec;
  }
  return CenterResult::ok;
}

// Finds z with E z = e and every c_j(z) < 0 by minimizing s over c_j(z) <= s, s >= -1.
Vector phase_one(const ConstraintSet& cs, Vector z, int& iterations, const SolveConfig& cfg) {
  const auto n = static_cast<int>(z.size());
  const double start_max = max_constraint(cs.ineq, z);
  if (start_max < 0.0) return z;
  if (!std::isfinite(start_max)) throw InfeasibleSubproblem("constraint is not finite at the start point");

  const Vector e_s = unit(n + 1, n);
  std::vector<SmoothFn> ineq;
  for (const auto& c : cs.ineq) ineq.push_back(c.embedded(n + 1, 0) + SmoothFn::affine(-e_s));
  ineq.push_back(SmoothFn::affine(-e_s, -1.0));
  const SmoothFn objective = SmoothFn::affine(e_s);
  Matrix eq = Matrix::Zero(cs.eq.rows(), n + 1);
  eq.leftCols(n) = cs.eq;

  Vector w(n + 1);
  w.head(n) = z;
  w[n] = start_max + 1.0;
  auto done = [&](const Vector& v) { return max_constraint(cs.ineq, v.head(n)) < 0.0; };
  SolveConfig phase_cfg = cfg;
  for (double mu = cfg.barrier_mu0; mu >= 1e-3 * cfg.eps_inner; mu *= cfg.barrier_shrink) {
    if (center(objective, ineq, eq, mu, w, iterations, phase_cfg, done) == CenterResult::budget) break;
    if (done(w)) return w.head(n);
  }
  throw InfeasibleSubproblem("no strictly feasible point found for the constraint set");
}

struct PolishResult {
  bool ok = false;
  Vector z;
  double residual = kInf;
};

// Newton on the KKT system of the active constraints A:
//   grad f + sum_A lam_j grad c_j + E' nu = 0,  c_A(z) = 0,  E z = e.
bool kkt_newton(const SmoothFn& f, const std::vector<SmoothFn>& ineq, const ConstraintSet& cs,
                const std::vector<int>& active, Vector& z, Vector& lam, double tol) {
  const auto n = static_cast<int>(z.size());
  const auto k = static_cast<int>(active.size());
  const auto p = static_cast<int>(cs.eq.rows());
  Vector nu = Vector::Zero(p);
  double best = kInf;
  int no_progress = 0;
  for (int it = 0; it < 60; ++it) {
    Vector stat = f.grad(z);
    Matrix h = f.hessian(z);
    Matrix jac(k, n);
    Vector cv(k);
    for (int a = 0; a < k; ++a) {
      const SmoothFn& c = ineq[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];
      const Vector gc = c.grad(z);
      jac.row(a) = gc.transpose();
      cv[a] = c.value(z);
      stat += lam[a] * gc;
      if (!c.is_affine()) h += lam[a] * c.hessian(z);
    }
    if (p > 0) stat += cs.eq.transpose() * nu;
    Vector r(n + k + p);
    r.head(n) = stat;
    r.segment(n, k) = cv;
    if (p > 0) r.tail(p) = cs.eq * z - cs.eq_rhs;
    const double norm = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(norm)) return false;
    if (norm <= 1e-15 * (1.0 + z.cwiseAbs().maxCoeff())) return true;
    if (norm < 0.5 * best) {
      no_progress = 0;
    } else if (++no_progress >= 3) {
      return best <= tol;
    }
    best = std::min(best, norm);
    Matrix j = Matrix::Zero(n + k + p, n + k + p);
    j.topLeftCorner(n, n) = h;
    j.block(0, n, n, k) = jac.transpose();
    j.block(n, 0, k, n) = jac;
    if (p > 0) {
      j.block(0, n + k, n, p) = cs.eq.transpose();
      j.block(n + k, 0, p, n) = cs.eq;
    }
    const Vector delta = j.completeOrthogonalDecomposition().solve(-r);
    if (!delta.allFinite()) return false;
    z += delta.head(n);
    lam += delta.segment(n, k);
    nu += delta.tail(p);
  }
  return best <= tol;
}

// Full first-order residual: stationarity, dual feasibility, primal feasibility,
// complementarity. Multipliers of inactive constraints are zero.
double kkt_residual(const SmoothFn& f, const std::vector<SmoothFn>& ineq, const ConstraintSet& cs, const Vector& z,
                    const Vector& lam_full) {
  Vector stat = f.grad(z);
  double other = 0.0;
  for (std::size_t j = 0; j < ineq.size(); ++j) {
    const double lj = lam_full[static_cast<Eigen::Index>(j)];
    const double cv = ineq[j].value(z);
    if (lj != 0.0) stat += lj * ineq[j].grad(z);
    other = std::max({other, cv, -lj, std::abs(lj * cv)});
  }
  if (cs.eq.rows() > 0) {
    // Equality multipliers by least squares.
    const Vector nu = cs.eq.transpose().completeOrthogonalDecomposition().solve(-stat);
    stat += cs.eq.transpose() * nu;
    other = std::max(other, (cs.eq * z - cs.eq_rhs).cwiseAbs().maxCoeff());
  }
  return std::max(stat.cwiseAbs().maxCoeff(), other);
}

PolishResult polish(const SmoothFn& f, const ConstraintSet& cs, const Vector& z_barrier, double mu, double eps) {
  const auto& ineq = cs.ineq;
  const auto m = static_cast<int>(ineq.size());
  std::vector<double> lam_est(static_cast<std::size_t>(m));
  std::vector<char> in_active(static_cast<std::size_t>(m), 0);
  for (int j = 0; j < m; ++j) {
    const double slack = -ineq[static_cast<std::size_t>(j)].value(z_barrier);
    lam_est[static_cast<std::size_t>(j)] = mu / slack;
    in_active[static_cast<std::size_t>(j)] = lam_est[static_cast<std::size_t>(j)] > slack ? 1 : 0;
  }
  for (int attempt = 0; attempt < m + 4; ++attempt) {
    std::vector<int> active;
    for (int j = 0; j < m; ++j) {
      if (in_active[static_cast<std::size_t>(j)]) active.push_back(j);
    }
    Vector z = z_barrier;
    Vector lam(static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) {
      lam[static_cast<Eigen::Index>(a)] = lam_est[static_cast<std::size_t>(active[a])];
    }
    if (!kkt_newton(f, ineq, cs, active, z, lam, eps)) return {};
    // Drop the most negative multiplier, else add the most violated inactive constraint.
    int drop = -1;
    double most_negative = -eps;
    for (std::size_t a = 0; a < active.size(); ++a) {
      if (lam[static_cast<Eigen::Index>(a)] < most_negative) {
        most_negative = lam[static_cast<Eigen::Index>(a)];
        drop = active[a];
      }
    }
    if (drop >= 0) {
      in_active[static_cast<std::size_t>(drop)] = 0;
      continue;
    }
    int add = -1;
    double most_violated = eps;
    for (int j = 0; j < m; ++j) {
      if (in_active[static_cast<std::size_t>(j)]) continue;
      const double v = ineq[static_cast<std::size_t>(j)].value(z);
      if (v > most_violated) {
        most_violated = v;
        add = j;
      }
    }
    if (add >= 0) {
      in_active[static_cast<std::size_t>(add)] = 1;
      continue;
    }
    Vector lam_full = Vector::Zero(m);
    for (std::size_t a = 0; a < active.size(); ++a) {
      lam_full[active[a]] = std::max(0.0, lam[static_cast<Eigen::Index>(a)]);
    }
    PolishResult out;
    out.z = z;
    out.residual = kkt_residual(f, ineq, cs, z, lam_full);
    out.ok = out.residual <= eps;
    return out;
  }
  return {};
}

InnerSolveReport solve_barrier(const ConvexSubproblem& sp, const Vector& start, const SolveConfig& cfg) {
  const int n = sp.objective.dim();
  const ConstraintSet cs = build_constraints(sp);
  Vector z = start;
  if (cs.eq.rows() > 0) {
    const Matrix eet = cs.eq * cs.eq.transpose();
    z += cs.eq.transpose() * eet.ldlt().solve(cs.eq_rhs - cs.eq * z);
  }
  int iterations = 0;
  z = phase_one(cs, z, iterations, cfg);
  const SmoothFn& f = sp.objective;

  double mu = cfg.barrier_mu0;
  while (true) {
    const CenterResult cr = center(f, cs.ineq, cs.eq, mu, z, iterations, cfg);
    if (cr == CenterResult::unbounded) return make_report(z, iterations, kInf, InnerStatus::unbounded, "barrier");
    if (mu <= 1e-2) {
      const PolishResult pr = polish(f, cs, z, mu, cfg.eps_inner);
      if (pr.ok) return make_report(pr.z, iterations, pr.residual, InnerStatus::converged, "barrier+polish");
    }
    if (cr == CenterResult::budget || mu <= cfg.eps_inner) break;
    mu *= cfg.barrier_shrink;
  }
  Vector lam = Vector::Zero(static_cast<Eigen::Index>(cs.ineq.size()));
  for (std::size_t j = 0; j < cs.ineq.size(); ++j) lam[static_cast<Eigen::Index>(j)] = mu / -cs.ineq[j].value(z);
  const double res = kkt_residual(f, cs.ineq, cs, z, lam);
  spdlog::debug("barrier finished without polish: residual {:.3e}, mu {:.1e}", res, mu);
  (void)n;
  return make_report(z, iterations, res, res <= cfg.eps_inner ? InnerStatus::converged : InnerStatus::max_iters,
                     "barrier");
}

}  // namespace

InnerSolveReport inner_convex_solve(const ConvexSubproblem& sp, const Vector& start, const SolveConfig& cfg) {
  const int n = sp.objective.dim();
  if (start.size() != n || sp.domain.dim() > n) throw DimensionMismatch("inner_convex_solve: dimension mismatch");
  const bool constrained = !sp.linear_constraints.empty() || !sp.convex_constraints.empty();
  if (!constrained) {
    if (sp.domain.kind() == DomainKind::whole_space) return solve_unconstrained(sp.objective, start, cfg);
    return solve_on_domain(sp.objective, sp.domain, start, cfg);
  }
  return solve_barrier(sp, start, cfg);
}

InnerSolveReport inner_convex_solve(const SmoothFn& objective, const Domain& domain,
                                    const std::vector<LinearConstraint>& linear_constraints,
                                    const SolveConfig& config) {
  const int n = objective.dim();
  Vector start = Vector::Zero(n);
  if (domain.kind() != DomainKind::whole_space) start.head(domain.dim()) = domain.interior_point();
  return inner_convex_solve(ConvexSubproblem{objective, domain, linear_constraints, {}}, start, config);
}

}  // namespace dcforge
