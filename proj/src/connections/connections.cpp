#include "dcforge/connections.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "dcforge/analysis.hpp"
#include "dcforge/errors.hpp"

namespace dcforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector join(const Vector& x, double t) {
  Vector w(x.size() + 1);
  w << x, t;
  return w;
}

/// The lifted coordinate t of w = (x, t).
SmoothFn t_coordinate(int n) {
  Vector e = Vector::Zero(n + 1);
  e[n] = 1.0;
  return SmoothFn::affine(e);
}

SmoothFn half_norm_sq(int n, double scale) { return SmoothFn::quadratic(scale * Matrix::Identity(n, n), Vector::Zero(n)); }

Domain prefix_domain(const std::optional<Domain>& d, int n) { return d ? *d : Domain::whole_space(n); }

SolveConfig outer_config(const SolveConfig& cfg, int iterations, StepRule rule) {
  SolveConfig c = cfg;
  c.max_outer_iters = iterations;
  c.gap_tol = 0.0;
  c.step_rule = std::move(rule);
  return c;
}

std::vector<Vector> base_path(const IterateTrace& trace, int n) {
  std::vector<Vector> path;
  path.reserve(trace.records.size() + 1);
  for (const auto& r : trace.records) path.push_back(r.iterate.head(n));
  path.push_back(trace.final_iterate.head(n));
  return path;
}

void compare(PairedTrace& out, double tol) {
  out.tolerance = tol;
  out.max_deviation = 0.0;
  const std::size_t n = std::min(out.fw_path.size(), out.direct_path.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.max_deviation = std::max(out.max_deviation, (out.fw_path[i] - out.direct_path[i]).lpNorm<Eigen::Infinity>());
  }
  const bool same_length = out.fw_path.size() == out.direct_path.size();
  out.passed = same_length && out.max_deviation <= tol;
  out.details = fmt::format("{} iterates, max deviation {:.3e} (tol {:.1e}){}", n, out.max_deviation, tol,
                            same_length ? "" : ", path lengths differ");
}

Vector solve_strict(const SmoothFn& objective, const Domain& domain, const Vector& start, const SolveConfig& cfg,
                    const char* who) {
  const InnerSolveReport rep = inner_convex_solve(ConvexSubproblem{objective, domain, {}, {}}, start, cfg);
  if (rep.status == InnerStatus::unbounded) throw Unbounded(fmt::format("{}: subproblem is unbounded below", who));
  if (rep.status != InnerStatus::converged) {
    throw MaxIters(fmt::format("{}: inner solve stopped at residual {:.3e}", who, rep.residual));
  }
  return rep.x_star;
}

void require_dim(int expected, const Vector& x, const char* who) {
  if (x.size() != expected) throw DimensionMismatch(fmt::format("{}: dimension mismatch", who));
}

}  // namespace

double ProxOracle::value(const Vector& x) const {
  if (domain && !domain->contains(x)) return kInf;
  double v = -kInf;
  for (const auto& p : pieces) v = std::max(v, p.value(x));
  return pieces.empty() ? 0.0 : v;
}

ProxOracle ProxOracle::zero(int dim) {
  return ProxOracle{"zero", dim, [](const Vector& z, double) -> Vector { return z; }, {SmoothFn::constant(dim, 0.0)},
                    std::nullopt};
}

ProxOracle ProxOracle::l1(int dim, double weight) {
  if (dim > 12) throw DimensionTooLarge("ProxOracle::l1: piecewise description needs 2^dim pieces (dim <= 12)");
  if (!(weight >= 0.0)) throw std::invalid_argument("ProxOracle::l1: weight must be >= 0");
  std::vector<SmoothFn> pieces;
  for (std::uint32_t mask = 0; mask < (1u << dim); ++mask) {
    Vector s(dim);
    for (int i = 0; i < dim; ++i) s[i] = (mask >> i) & 1u ? -weight : weight;
    pieces.push_back(SmoothFn::affine(s));
  }
  auto prox = [weight](const Vector& z, double lambda) -> Vector {
    const double thr = lambda * weight;
    return z.unaryExpr([thr](double v) { return std::copysign(std::max(std::abs(v) - thr, 0.0), v); });
  };
  return ProxOracle{fmt::format("{}*l1", weight), dim, prox, std::move(pieces), std::nullopt};
}

ProxOracle ProxOracle::box_indicator(Vector lower, Vector upper) {
  const int dim = static_cast<int>(lower.size());
  Domain box = Domain::box(lower, upper);
  auto prox = [lower, upper](const Vector& z, double) -> Vector { return z.cwiseMax(lower).cwiseMin(upper); };
  return ProxOracle{"box_indicator", dim, prox, {SmoothFn::constant(dim, 0.0)}, box};
}

ProxOracle ProxOracle::half_square(Vector center, double weight) {
  if (!(weight >= 0.0)) throw std::invalid_argument("ProxOracle::half_square: weight must be >= 0");
  const int dim = static_cast<int>(center.size());
  SmoothFn h = SmoothFn::quadratic(weight * Matrix::Identity(dim, dim), -weight * center,
                                   0.5 * weight * center.squaredNorm());
  auto prox = [center, weight](const Vector& z, double lambda) -> Vector {
    return (z + lambda * weight * center) / (1.0 + lambda * weight);
  };
  return ProxOracle{fmt::format("{}/2*|x-c|^2", weight), dim, prox, {h}, std::nullopt};
}

double BregmanOracle::bregman(const Vector& x, const Vector& y) const {
  return phi.value(x) - phi.value(y) - phi.grad(y).dot(x - y);
}

BregmanOracle BregmanOracle::euclidean(int dim, double lipschitz) {
  if (!(lipschitz > 0.0)) throw std::invalid_argument("BregmanOracle::euclidean: L must be > 0");
  return BregmanOracle{fmt::format("euclidean(L={})", lipschitz), half_norm_sq(dim, lipschitz), lipschitz,
                       std::nullopt, [lipschitz](const Vector& z) -> Vector { return z / lipschitz; }};
}

namespace {

double xlogx(double v) { return v == 0.0 ? 0.0 : v * std::log(v); }

}  // namespace

BregmanOracle BregmanOracle::entropic_simplex(int dim) {
  auto value = [](const Vector& x) {
    double s = 0.0;
    for (double v : x) {
      if (v < 0.0) return kInf;
      s += xlogx(v);
    }
    return s;
  };
  auto grad = [](const Vector& x) -> Vector { return x.unaryExpr([](double v) { return std::log(v) + 1.0; }); };
  SmoothFn phi = SmoothFn(dim, value, grad, Curvature::convex)
                     .with_hessian([](const Vector& x) -> Matrix { return x.cwiseInverse().asDiagonal(); })
                     .with_name("entropy");
  auto softmax = [](const Vector& z) -> Vector {
    const Vector e = (z.array() - z.maxCoeff()).exp().matrix();
    return e / e.sum();
  };
  // On the simplex sum x log x is 1-strongly convex in l1, hence in l2.
  return BregmanOracle{"entropic_simplex", phi, 1.0, Domain::simplex(dim), softmax};
}

BregmanOracle BregmanOracle::entropic_box(int dim, double upper) {
  if (!(upper > 0.0)) throw std::invalid_argument("BregmanOracle::entropic_box: upper bound must be > 0");
  auto value = [](const Vector& x) {
    double s = 0.0;
    for (double v : x) {
      if (v < 0.0) return kInf;
      s += xlogx(v) - v;
    }
    return s;
  };
  auto grad = [](const Vector& x) -> Vector { return x.unaryExpr([](double v) { return std::log(v); }); };
  SmoothFn phi = SmoothFn(dim, value, grad, Curvature::convex)
                     .with_hessian([](const Vector& x) -> Matrix { return x.cwiseInverse().asDiagonal(); })
                     .with_name("entropy_box");
  auto conj = [upper](const Vector& z) -> Vector {
    return z.unaryExpr([upper](double v) { return std::min(std::exp(v), upper); });
  };
  return BregmanOracle{fmt::format("entropic_box(B={})", upper), phi, 1.0 / upper,
                       Domain::box(Vector::Zero(dim), Vector::Constant(dim, upper)), conj};
}

PairedTrace ppm_via_fw(const SmoothFn& f, const BregmanOracle& breg, const Vector& x1, int iterations,
                       const SolveConfig& config) {
  const int n = breg.dim();
  if (f.dim() != n) throw DimensionMismatch("ppm_via_fw: f and phi dimensions differ");
  require_dim(n, x1, "ppm_via_fw");
  const SolveConfig cfg = outer_config(config, iterations, StepRule::unit());
  const Domain dom = prefix_domain(breg.domain, n);

  const SmoothFn phi_lift = (t_coordinate(n) - breg.phi.embedded(n + 1)).with_curvature(Curvature::concave);
  FeasibleRegion region{n + 1, dom, {}, {((f + breg.phi).embedded(n + 1) - t_coordinate(n)).with_curvature(Curvature::convex)}};
  const IterateTrace fw = fw_solve(phi_lift, region, join(x1, f.value(x1) + breg.phi.value(x1)), cfg);

  PairedTrace out;
  out.name = "ppm";
  out.fw_path = base_path(fw, n);
  Vector x = x1;
  out.direct_path.push_back(x);
  for (int k = 1; k <= iterations; ++k) {
    const Vector gphi = breg.phi.grad(x);
    if (f.is_affine()) {
      x = breg.conjugate_grad(gphi - f.grad(x));
    } else {
      x = solve_strict((f + breg.phi).plus_affine(-gphi), dom, x, cfg, "ppm_via_fw");
    }
    out.direct_path.push_back(x);
  }
  compare(out, 10.0 * config.eps_inner);
  return out;
}

PairedTrace mirror_descent_via_fw(const SmoothFn& f, const BregmanOracle& breg, const Vector& x1,
                                  const std::function<double(int)>& steps, int iterations, const SolveConfig& config) {
  const int n = breg.dim();
  if (f.dim() != n) throw DimensionMismatch("mirror_descent_via_fw: f and phi dimensions differ");
  require_dim(n, x1, "mirror_descent_via_fw");
  if (!steps) throw std::invalid_argument("mirror_descent_via_fw: missing step schedule");
  const SolveConfig cfg = outer_config(config, iterations, StepRule::custom(steps));

  const SmoothFn phi_lift = t_coordinate(n) + f.embedded(n + 1) - breg.phi.embedded(n + 1);
  FeasibleRegion region{n + 1, prefix_domain(breg.domain, n), {},
                        {(breg.phi.embedded(n + 1) - t_coordinate(n)).with_curvature(Curvature::convex)}};
  const IterateTrace fw = fw_solve(phi_lift, region, join(x1, breg.phi.value(x1)), cfg);

  PairedTrace out;
  out.name = "mirror";
  out.fw_path = base_path(fw, n);
  Vector x = x1;
  out.direct_path.push_back(x);
  for (int k = 1; k <= iterations; ++k) {
    x = breg.conjugate_grad(breg.phi.grad(x) - steps(k) * f.grad(x));
    out.direct_path.push_back(x);
  }
  compare(out, 10.0 * config.eps_inner);

  // Post-hoc curvature of the lifted objective over the visited region.
  Vector lo = fw.final_iterate, hi = fw.final_iterate;
  for (const auto& r : fw.records) {
    lo = lo.cwiseMin(r.iterate);
    hi = hi.cwiseMax(r.iterate);
  }
  if (lo.allFinite() && hi.allFinite()) {
    out.sampled_curvature = estimate_curvature(phi_lift, Domain::box(lo, hi), 100, 10).sampled_lower_bound;
    out.details += fmt::format(", sampled lift curvature {:.3e}", *out.sampled_curvature);
  }
  return out;
}

PairedTrace prox_grad_via_fw(const SmoothFn& f, const ProxOracle& g, const Vector& x1, int iterations,
                             const SolveConfig& config) {
  const int n = f.dim();
  if (g.dim != n) throw DimensionMismatch("prox_grad_via_fw: f and g dimensions differ");
  require_dim(n, x1, "prox_grad_via_fw");
  const auto lip = f.lipschitz_grad();
  if (!lip || !(*lip > 0.0)) throw std::invalid_argument("prox_grad_via_fw: f needs a positive gradient Lipschitz constant");
  const double L = *lip;
  const SolveConfig cfg = outer_config(config, iterations, StepRule::unit());

  const SmoothFn q = half_norm_sq(n, L);
  const SmoothFn phi_lift = (f.embedded(n + 1) - q.embedded(n + 1) + t_coordinate(n)).with_curvature(Curvature::concave);
  FeasibleRegion region{n + 1, prefix_domain(g.domain, n), {}, {}};
  for (const auto& piece : g.pieces) {
    region.convex_constraints.push_back(((piece + q).embedded(n + 1) - t_coordinate(n)).with_curvature(Curvature::convex));
  }
  const IterateTrace fw = fw_solve(phi_lift, region, join(x1, g.value(x1) + q.value(x1)), cfg);

  PairedTrace out;
  out.name = "proxgrad";
  out.fw_path = base_path(fw, n);
  Vector x = x1;
  out.direct_path.push_back(x);
  for (int k = 1; k <= iterations; ++k) {
    x = g.prox(x - f.grad(x) / L, 1.0 / L);
    out.direct_path.push_back(x);
  }
  compare(out, 10.0 * config.eps_inner);
  return out;
}

IterateTrace dual_cccp_prox(const ProxOracle& f, const ProxOracle& g, double x1, const std::function<double(int)>& steps,
                            int iterations) {
  if (f.dim != 1 || g.dim != 1) throw DimensionMismatch("dual_cccp_prox: only one-dimensional prox pairs are supported");
  if (!steps) throw std::invalid_argument("dual_cccp_prox: missing step schedule");
  if (iterations <= 0) throw std::invalid_argument("dual_cccp_prox: iterations must be positive");
  auto scalar = [](const ProxOracle& p, double z) { return p.prox(Vector::Constant(1, z), 1.0)[0]; };

  IterateTrace trace;
  trace.algorithm = "dual_cccp_prox";
  double x = x1;
  for (int k = 1; k <= iterations; ++k) {
    const double target = scalar(f, x);
    // prox_g is nondecreasing, so the residual is monotone and a sign change brackets the root.
    auto r = [&](double y) { return scalar(g, y) - target; };
    double width = std::max(1.0, std::abs(x));
    double lo = x - width, hi = x + width;
    int expansions = 0;
    while (r(lo) > 0.0 && expansions < 64) {
      lo -= width;
      width *= 2.0;
      ++expansions;
    }
    width = std::max(1.0, std::abs(x));
    while (r(hi) < 0.0 && expansions < 128) {
      hi += width;
      width *= 2.0;
      ++expansions;
    }
    const double rlo = r(lo), rhi = r(hi);
    if (!(rlo <= 0.0 && rhi >= 0.0)) {
      throw NoSolution(fmt::format("dual_cccp_prox: prox_g(y) = {:.6g} has no root in [{:.3g}, {:.3g}]", target, lo, hi));
    }
    double x_star;
    if (rlo == 0.0) {
      x_star = lo;
    } else if (rhi == 0.0) {
      x_star = hi;
    } else {
      std::uintmax_t max_iter = 200;
      const auto bracket = boost::math::tools::toms748_solve(r, lo, hi, rlo, rhi,
                                                             boost::math::tools::eps_tolerance<double>(52), max_iter);
      x_star = std::abs(r(bracket.first)) <= std::abs(r(bracket.second)) ? bracket.first : bracket.second;
    }
    const double eta = steps(k);
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("dual_cccp_prox: step outside [0, 1]");

    IterateRecord rec;
    rec.k = k;
    rec.iterate = Vector::Constant(1, x);
    rec.objective = f.value(rec.iterate) - g.value(rec.iterate);
    rec.step = eta;
    rec.kkt_residual = std::abs(r(x_star));
    trace.records.push_back(std::move(rec));
    x = (1.0 - eta) * x + eta * x_star;
  }
  trace.final_iterate = Vector::Constant(1, x);
  return trace;
}

PairedTrace fw_as_cccp(const SmoothFn& g, const Domain& domain, const Vector& x1, int iterations,
                       const SolveConfig& config) {
  const int n = domain.dim();
  if (g.dim() != n) throw DimensionMismatch("fw_as_cccp: g and domain dimensions differ");
  require_dim(n, x1, "fw_as_cccp");
  if (!domain.has_lmo()) throw UnsupportedDomain("fw_as_cccp: the domain needs a linear minimization oracle");
  const SolveConfig cfg = outer_config(config, iterations, StepRule::unit());

  const DCProblem p{.name = "fw_as_cccp",
                    .f = SmoothFn::constant(n, 0.0),
                    .g = g,
                    .domain = domain,
                    .constraints = {},
                    .x_init = x1};
  const IterateTrace cccp = cccp_solve(p, cfg);
  const IterateTrace fw = fw_solve(-g, domain, x1, cfg);

  PairedTrace out;
  out.name = "fwascccp";
  out.fw_path = base_path(fw, n);
  out.direct_path = base_path(cccp, n);
  compare(out, 10.0 * config.eps_inner);
  return out;
}

}  // namespace dcforge
