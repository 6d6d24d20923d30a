#include "dcforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <typeinfo>

#include <fmt/format.h>

#include "dcforge/errors.hpp"
#include "dcforge/kernels.hpp"

namespace dcforge {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double dc_gap(const DCProblem& p, const Vector& x_k, const Vector& x_next) {
  return p.f.value(x_k) - p.f.value(x_next) - p.g.grad(x_k).dot(x_k - x_next);
}

double fw_gap(const SmoothFn& phi, const FeasibleRegion& region, const Vector& w, const SolveConfig& config,
              const std::vector<SmoothFn>& psis) {
  const Vector g = phi.grad(w);
  ConvexSubproblem sp{SmoothFn::affine(g), region.domain, region.linear_constraints, region.convex_constraints};
  for (const auto& psi : psis) {
    const Vector gp = psi.grad(w);
    sp.linear_constraints.push_back({gp, gp.dot(w) - psi.value(w)});
  }
  const InnerSolveReport rep = inner_convex_solve(sp, w, config);
  if (rep.status == InnerStatus::unbounded) throw Unbounded("fw_gap: the gap is unbounded");
  if (rep.status == InnerStatus::max_iters) throw MaxIters("fw_gap: inner solve did not converge");
  return g.dot(w - rep.x_star);
}

double fw_gap(const EpigraphLift& lift, const Vector& w, const SolveConfig& config) {
  return fw_gap(lift.phi(), lift.region(), w, config, lift.psis());
}

std::vector<GapRecord> gap_records(const IterateTrace& trace, std::optional<double> phi_star) {
  std::vector<GapRecord> out;
  double running = kInf;
  const double phi_1 = trace.records.empty() ? 0.0 : trace.records.front().objective;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    GapRecord g;
    g.iteration = r.k;
    g.fw_gap = r.fw_gap;
    g.dc_gap = r.dc_gap;
    g.kkt_residual = r.kkt_residual;
    if (const auto gap = trace.gap(i)) running = std::min(running, *gap);
    g.min_gap_so_far = running;
    if (phi_star) g.bound_rhs = (phi_1 - *phi_star) / static_cast<double>(r.k);
    out.push_back(g);
  }
  return out;
}

// ---------------------------------------------------------------- curvature

namespace {

Vector sample_point(const Domain& d, Lcg64& rng) {
  const int n = d.dim();
  switch (d.kind()) {
    case DomainKind::box: {
      Vector x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.uniform(d.lower()[i], d.upper()[i]);
      return x;
    }
    case DomainKind::simplex: {
      Vector w(n);
      for (int i = 0; i < n; ++i) w[i] = -std::log(1.0 - rng.uniform());
      return d.radius() * w / w.sum();
    }
    case DomainKind::l2_ball:
      return d.project(d.center() + d.radius() * rng.uniform_vector(n, -1.0, 1.0));
    case DomainKind::vertex_polytope: {
      const auto nv = d.vertices().cols();
      Vector w(nv);
      for (Eigen::Index i = 0; i < nv; ++i) w[i] = -std::log(1.0 - rng.uniform());
      return d.vertices() * (w / w.sum());
    }
    case DomainKind::whole_space:
      break;
  }
  throw UnboundedDomain("cannot sample an unbounded domain");
}

std::vector<Vector> extreme_points(const Domain& d, Lcg64& rng) {
  const int n = d.dim();
  std::vector<Vector> pts;
  switch (d.kind()) {
    case DomainKind::box: {
      if (n <= 6) {
        for (int mask = 0; mask < (1 << n); ++mask) {
          Vector v(n);
          for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? d.upper()[i] : d.lower()[i];
          pts.push_back(v);
        }
      } else {
        for (int s = 0; s < 64; ++s) {
          Vector v(n);
          for (int i = 0; i < n; ++i) v[i] = rng.uniform() < 0.5 ? d.lower()[i] : d.upper()[i];
          pts.push_back(v);
        }
      }
      break;
    }
    case DomainKind::simplex:
      for (int i = 0; i < n; ++i) pts.push_back(d.radius() * Vector::Unit(n, i));
      break;
    case DomainKind::l2_ball:
      for (int i = 0; i < n; ++i) {
        pts.push_back(d.center() + d.radius() * Vector::Unit(n, i));
        pts.push_back(d.center() - d.radius() * Vector::Unit(n, i));
      }
      break;
    case DomainKind::vertex_polytope:
      for (Eigen::Index j = 0; j < d.vertices().cols(); ++j) pts.push_back(d.vertices().col(j));
      break;
    case DomainKind::whole_space:
      break;
  }
  return pts;
}

}  // namespace

CurvatureEstimate estimate_curvature(const SmoothFn& phi, const Domain& domain, int n_pairs, int n_etas,
                                     std::uint64_t seed) {
  if (phi.dim() != domain.dim()) throw DimensionMismatch("estimate_curvature: dimension mismatch");
  const double diameter = domain.diameter();
  if (!std::isfinite(diameter)) throw UnboundedDomain("estimate_curvature: domain has infinite diameter");
  if (n_pairs < 0 || n_etas <= 0) throw std::invalid_argument("estimate_curvature: bad sample counts");
  Lcg64 rng(seed);
  const std::vector<Vector> extremes = extreme_points(domain, rng);
  std::vector<kernels::PointPair> pairs;
  for (const auto& a : extremes) {
    for (const auto& b : extremes) {
      if (&a != &b) pairs.emplace_back(a, b);
    }
  }
  for (int i = 0; i < n_pairs; ++i) {
    Vector a = sample_point(domain, rng);
    Vector b = sample_point(domain, rng);
    pairs.emplace_back(std::move(a), std::move(b));
    if (!extremes.empty()) {
      const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(extremes.size()));
      pairs.emplace_back(sample_point(domain, rng), extremes[std::min(j, extremes.size() - 1)]);
    }
  }
  std::vector<double> etas;
  for (int k = 1; k <= n_etas; ++k) etas.push_back(static_cast<double>(k) / n_etas);

  CurvatureEstimate est;
  est.sampled_lower_bound = pairs.empty() ? 0.0 : kernels::curvature_sup_parallel(phi, pairs, etas);
  est.samples = static_cast<int>(pairs.size()) * n_etas;
  if (const auto lip = phi.lipschitz_grad()) est.analytic_upper_bound = *lip * diameter * diameter;
  return est;
}

// ---------------------------------------------------------------- certificates

const char* to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::lemma1_rate:
      return "lemma1_rate";
    case CertificateKind::corollary2_rate:
      return "corollary2_rate";
    case CertificateKind::theorem3_rate:
      return "theorem3_rate";
    case CertificateKind::corollary6_rate:
      return "corollary6_rate";
    case CertificateKind::appendix_convex_phi:
      return "appendix_convex_phi";
    case CertificateKind::appendix_convex_psi:
      return "appendix_convex_psi";
    case CertificateKind::equivalence:
      return "equivalence";
    case CertificateKind::kkt:
      return "kkt";
    case CertificateKind::stationarity:
      return "stationarity";
  }
  return "stationarity";
}

CertificateKind parse_certificate_kind(const std::string& name) {
  for (const auto kind : {CertificateKind::lemma1_rate, CertificateKind::corollary2_rate,
                          CertificateKind::theorem3_rate, CertificateKind::corollary6_rate,
                          CertificateKind::appendix_convex_phi, CertificateKind::appendix_convex_psi,
                          CertificateKind::equivalence, CertificateKind::kkt, CertificateKind::stationarity}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown certificate kind '" + name + "'");
}

Certificate check_stationarity(const SmoothFn& phi, const FeasibleRegion& region, const std::vector<SmoothFn>& psis,
                               const Vector& w_star, double tol, const SolveConfig& config) {
  if (!region.contains(w_star, tol)) throw InfeasiblePoint("check_stationarity: point is outside the region");
  for (const auto& psi : psis) {
    if (psi.value(w_star) > tol) throw InfeasiblePoint("check_stationarity: point violates a constraint");
  }
  Certificate c;
  c.kind = CertificateKind::stationarity;
  try {
    c.worst_margin = -fw_gap(phi, region, w_star, config, psis);
  } catch (const Unbounded&) {
    c.worst_margin = -kInf;
  }
  c.passed = c.worst_margin >= -tol;
  c.details = fmt::format("min directional derivative {:.6e} (tol {:.1e})", c.worst_margin, tol);
  return c;
}

Certificate check_stationarity(const EpigraphLift& lift, const Vector& w_star, double tol,
                               const SolveConfig& config) {
  return check_stationarity(lift.phi(), lift.region(), lift.psis(), w_star, tol, config);
}

Certificate check_stationarity(const DCProblem& p, const Vector& x_star, double tol, const SolveConfig& config) {
  const EpigraphLift lift = make_lift(p);
  return check_stationarity(lift, lift.embed(x_star), tol, config);
}

Certificate certify_rates(const IterateTrace& trace, const std::optional<KnownOptimum>& optimum,
                          CertificateKind kind, const RateContext& ctx) {
  Certificate c;
  c.kind = kind;
  auto not_applicable = [&](const std::string& why) {
    c.applicable = false;
    c.passed = true;
    c.worst_margin = 0.0;
    c.details = "not applicable: " + why;
    return c;
  };
  if (trace.records.empty()) return not_applicable("empty trace");
  const std::string label = ctx.oracle_relative ? " (oracle-relative optimum)" : "";
  double worst = kInf;
  int worst_k = 0;

  switch (kind) {
    case CertificateKind::lemma1_rate:
    case CertificateKind::corollary2_rate:
    case CertificateKind::theorem3_rate:
    case CertificateKind::corollary6_rate: {
      if (!optimum) return not_applicable("no known optimum");
      const double head = trace.records.front().objective - optimum->f_star;
      double running = kInf;
      for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto gap = trace.gap(i);
        if (!gap) return not_applicable("trace has no gap column");
        running = std::min(running, *gap);
        const int k = trace.records[i].k;
        const double margin = head / static_cast<double>(k) - running;
        if (margin < worst) {
          worst = margin;
          worst_k = k;
        }
      }
      c.details = fmt::format("min gap vs ({:.6g}) / k over {} iterations, worst at k={}{}", head,
                              trace.records.size(), worst_k, label);
      break;
    }
    case CertificateKind::appendix_convex_phi: {
      if (!optimum) return not_applicable("no known optimum");
      if (!ctx.curvature_bound) return not_applicable("no curvature bound");
      for (const auto& r : trace.records) {
        const double margin = 2.0 * *ctx.curvature_bound / (r.k + 1.0) - (r.objective - optimum->f_star);
        if (margin < worst) {
          worst = margin;
          worst_k = r.k;
        }
      }
      c.details = fmt::format("phi_k - phi* vs 2C/(k+1), C = {:.6g}, worst at k={}{}", *ctx.curvature_bound,
                              worst_k, label);
      break;
    }
    case CertificateKind::appendix_convex_psi: {
      if (!ctx.curvature_bound) return not_applicable("no curvature bound");
      for (const auto& r : trace.records) {
        if (!r.feas_max) return not_applicable("trace has no constraint values");
        const double margin = 2.0 * *ctx.curvature_bound / (r.k + 1.0) - *r.feas_max;
        if (margin < worst) {
          worst = margin;
          worst_k = r.k;
        }
      }
      c.details = fmt::format("max psi(w_k) vs 2C/(k+1), C = {:.6g}, worst at k={}", *ctx.curvature_bound, worst_k);
      break;
    }
    case CertificateKind::kkt:
      return certify_kkt(trace, ctx.tolerance);
    default:
      throw std::invalid_argument(std::string("certify_rates: ") + to_string(kind) + " is not a rate certificate");
  }
  c.worst_margin = worst;
  c.passed = worst >= -ctx.tolerance;
  return c;
}

Certificate certify_kkt(const IterateTrace& trace, double tol) {
  Certificate c;
  c.kind = CertificateKind::kkt;
  double worst = 0.0;
  bool any = false;
  for (const auto& r : trace.records) {
    if (r.kkt_residual) {
      any = true;
      worst = std::max(worst, *r.kkt_residual);
    }
  }
  if (!any) {
    c.applicable = false;
    c.passed = true;
    c.details = "not applicable: trace has no KKT residuals";
    return c;
  }
  c.worst_margin = -worst;
  c.passed = worst <= tol;
  c.details = fmt::format("max |grad f(x_k+1) - grad g(x_k)| = {:.3e} (tol {:.1e})", worst, tol);
  return c;
}

namespace {

struct RunOutcome {
  std::optional<IterateTrace> trace;
  std::string error_type;
  std::string error;
};

template <typename F>
RunOutcome guarded(F&& f) {
  RunOutcome out;
  try {
    out.trace = f();
  } catch (const Error& e) {
    out.error_type = typeid(e).name();
    out.error = e.what();
  }
  return out;
}

}  // namespace

Certificate certify_equivalence(const DCProblem& p, const SolveConfig& config, int iterations,
                                std::optional<double> tolerance, EquivalenceDeviation* deviation) {
  SolveConfig cfg = config;
  cfg.max_outer_iters = iterations;
  cfg.gap_tol = 0.0;
  cfg.step_rule = StepRule::unit();
  const double tol = tolerance ? *tolerance : 10.0 * cfg.eps_inner;

  Certificate c;
  c.kind = CertificateKind::equivalence;
  const bool constrained = !p.constraints.empty();
  const EpigraphLift lift = make_lift(p);
  const RunOutcome direct =
      guarded([&] { return constrained ? cccp_plus_solve(p, cfg) : cccp_solve(p, cfg); });
  const RunOutcome lifted = guarded([&] {
    return constrained ? fw_plus_solve(lift.phi(), lift.region(), lift.psis(), lift.embed(p.x_init), cfg)
                       : fw_solve(lift.phi(), lift.region(), lift.embed(p.x_init), cfg);
  });
  if (!direct.trace || !lifted.trace) {
    const bool same = !direct.trace && !lifted.trace && direct.error_type == lifted.error_type;
    c.passed = same;
    c.worst_margin = same ? 0.0 : -kInf;
    c.details = fmt::format("direct: {}; lifted: {}", direct.trace ? "ok" : direct.error,
                            lifted.trace ? "ok" : lifted.error);
    return c;
  }

  EquivalenceDeviation dev;
  const auto& a = direct.trace->records;
  const auto& b = lifted.trace->records;
  const std::size_t count = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < count; ++i) {
    const Vector x_fw = lift.extract(b[i].iterate);
    dev.iterate = std::max(dev.iterate, (a[i].iterate - x_fw).norm());
    if (a[i].dc_gap && b[i].fw_gap) dev.gap = std::max(dev.gap, std::abs(*a[i].dc_gap - *b[i].fw_gap));
    if (a[i].kkt_residual) dev.kkt = std::max(dev.kkt, *a[i].kkt_residual);
    dev.slackness = std::max(dev.slackness, std::abs(b[i].iterate[lift.base_dim()] - p.f.value(x_fw)));
    if (a[i].feas_max) dev.feasibility = std::max(dev.feasibility, *a[i].feas_max);
  }
  dev.compared = static_cast<int>(count);
  if (deviation) *deviation = dev;
  const double worst = std::max({dev.iterate, dev.gap, dev.kkt, dev.slackness});
  c.worst_margin = -worst;
  c.passed = worst <= tol && a.size() == b.size();
  c.details = fmt::format("{} iterations: |dx| {:.2e}, |dgap| {:.2e}, kkt {:.2e}, |t0 - f0(x)| {:.2e} (tol {:.1e})",
                          count, dev.iterate, dev.gap, dev.kkt, dev.slackness, tol);
  return c;
}

}  // namespace dcforge
