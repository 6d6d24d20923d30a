#include "dcforge/cli/battery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "dcforge/analysis.hpp"
#include "dcforge/errors.hpp"
#include "dcforge/transforms.hpp"

namespace dcforge::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CheckResult from_certificate(const std::string& suite, const std::string& name, const Certificate& c,
                             double tol = 0.0) {
  return CheckResult{suite, name, c.passed && c.applicable, c.worst_margin + tol,
                     c.applicable ? c.details : c.details + " (required)"};
}

/// Runs `body`, turning library failures into a failed check.
template <typename F>
void guarded(std::vector<CheckResult>& out, const std::string& suite, const std::string& name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    out.push_back(CheckResult{suite, name, false, -kInf, std::string("error: ") + e.what()});
  }
}

std::vector<std::string> unconstrained_zoo() {
  std::vector<std::string> names{"quartic1d"};
  for (int s = 1; s <= 10; ++s) names.push_back(fmt::format("quadratic_dc:{}", s));
  return names;
}

std::vector<std::string> constrained_zoo() {
  std::vector<std::string> names{"ring2d:v1", "ring2d:v2"};
  for (int s = 1; s <= 5; ++s) names.push_back(fmt::format("dc_constrained:{}", s));
  return names;
}

SolveConfig outer(int iterations) {
  SolveConfig cfg;
  cfg.max_outer_iters = iterations;
  return cfg;
}

Matrix random_psd(Lcg64& rng, int n, double shift) {
  const Matrix m = rng.uniform_matrix(n, n, -1.0, 1.0);
  return m.transpose() * m + shift * Matrix::Identity(n, n);
}

}  // namespace

FwPlusInstance make_concave_exclusion_instance() {
  const Matrix id = Matrix::Identity(2, 2);
  const Vector a = (Vector(2) << 0.3, 0.2).finished();
  const Vector b = (Vector(2) << -0.5, 0.0).finished();
  const Domain box = Domain::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  FwPlusInstance inst{
      .name = "concave_exclusion",
      .phi = SmoothFn::quadratic(-id, a, -0.5 * a.squaredNorm()),
      .region = FeasibleRegion::of(box),
      .psis = {SmoothFn::quadratic(-2.0 * id, 2.0 * b, 0.5 - b.squaredNorm())},
      .w1 = Vector::Constant(2, 1.0),
      // The feasible point farthest from a is the corner (-1, -1).
      .optimum = KnownOptimum{Vector::Constant(2, -1.0), -0.5 * (Vector::Constant(2, -1.0) - a).squaredNorm()},
      .phi_curvature_bound = 1.0 * 8.0,
      .psi_curvature_bound = 2.0 * 8.0,
  };
  return inst;
}

FwPlusInstance make_convex_box_instance() {
  const Matrix id = Matrix::Identity(2, 2);
  const Domain box = Domain::box(Vector::Constant(2, -2.0), Vector::Constant(2, 2.0));
  const double d2 = box.diameter() * box.diameter();
  FwPlusInstance inst{
      .name = "convex_box",
      .phi = SmoothFn::quadratic(id, Vector::Zero(2)),
      .region = FeasibleRegion::of(box),
      .psis = {SmoothFn::quadratic(2.0 * id, Vector::Zero(2), -1.0)},
      .w1 = Vector::Constant(2, 2.0),
      .optimum = KnownOptimum{Vector::Zero(2), 0.0},
      .phi_curvature_bound = 1.0 * d2,
      .psi_curvature_bound = 2.0 * d2,
  };
  return inst;
}

std::vector<CheckResult> equivalence_unconstrained(int iterations, double tol) {
  std::vector<CheckResult> out;
  for (const auto& name : unconstrained_zoo()) {
    guarded(out, "equivalence", name, [&] {
      const BenchmarkInstance inst = make_instance(name);
      const Certificate c = certify_equivalence(inst.problem, outer(iterations), iterations, tol);
      out.push_back(from_certificate("equivalence", name + " cccp~fw", c, tol));
    });
  }
  return out;
}

std::vector<CheckResult> equivalence_constrained(int iterations, double tol, double feas_tol) {
  std::vector<CheckResult> out;
  for (const auto& name : constrained_zoo()) {
    guarded(out, "equivalence", name, [&] {
      const BenchmarkInstance inst = make_instance(name);
      EquivalenceDeviation dev;
      const Certificate c = certify_equivalence(inst.problem, outer(iterations), iterations, tol, &dev);
      out.push_back(from_certificate("equivalence", name + " cccp+~fw+", c, tol));
      out.push_back(CheckResult{"equivalence", name + " feasibility", dev.feasibility <= feas_tol,
                                feas_tol - dev.feasibility,
                                fmt::format("max_i f_i - g_i over {} iterates = {:.3e}", dev.compared, dev.feasibility)});
    });
  }
  return out;
}

std::vector<CheckResult> cccp_rate_checks(int iterations) {
  std::vector<CheckResult> out;
  for (const auto& name : unconstrained_zoo()) {
    guarded(out, "rates", name, [&] {
      const BenchmarkInstance inst = make_instance(name);
      const IterateTrace trace = cccp_solve(inst.problem, outer(iterations));
      const Certificate c = certify_rates(trace, inst.known_optimum, CertificateKind::corollary2_rate);
      out.push_back(from_certificate("rates", name + " cccp min-gap", c));
    });
  }
  return out;
}

std::vector<CheckResult> fw_plus_concave_rate_checks(int iterations, double feas_tol) {
  std::vector<CheckResult> out;
  auto check = [&](const std::string& name, const SmoothFn& phi, const FeasibleRegion& region,
                   const std::vector<SmoothFn>& psis, const Vector& w1, const std::optional<KnownOptimum>& opt) {
    guarded(out, "rates", name, [&] {
      if (fw_plus_mode(phi, psis) != FwPlusMode::concave) throw MixedCurvature("expected a concave instance");
      const IterateTrace trace = fw_plus_solve(phi, region, psis, w1, outer(iterations));
      const Certificate c = certify_rates(trace, opt, CertificateKind::theorem3_rate);
      out.push_back(from_certificate("rates", name + " fw+ min-gap", c));
      double worst = -kInf;
      for (const auto& r : trace.records) {
        if (r.k >= 2 && r.feas_max) worst = std::max(worst, *r.feas_max);
      }
      out.push_back(CheckResult{"rates", name + " fw+ feasibility", worst <= feas_tol, feas_tol - worst,
                                fmt::format("max psi(w_k), k >= 2: {:.3e}", worst)});
    });
  };
  for (const char* name : {"ring2d:v1", "ring2d:v2"}) {
    const BenchmarkInstance inst = make_instance(name);
    const EpigraphLift lift = make_lift(inst.problem);
    check(name, lift.phi(), lift.region(), lift.psis(), lift.embed(inst.problem.x_init), inst.known_optimum);
  }
  const FwPlusInstance ex = make_concave_exclusion_instance();
  check(ex.name, ex.phi, ex.region, ex.psis, ex.w1, ex.optimum);
  return out;
}

std::vector<CheckResult> cccp_plus_rate_checks(int iterations) {
  std::vector<CheckResult> out;
  for (const char* name : {"ring2d:v1", "ring2d:v2"}) {
    guarded(out, "rates", name, [&] {
      const BenchmarkInstance inst = make_instance(name);
      const IterateTrace trace = cccp_plus_solve(inst.problem, outer(iterations));
      const Certificate c = certify_rates(trace, inst.known_optimum, CertificateKind::corollary6_rate);
      out.push_back(from_certificate("rates", std::string(name) + " cccp+ min-gap", c));
    });
  }
  return out;
}

std::vector<CheckResult> fw_plus_convex_rate_checks(int iterations) {
  std::vector<CheckResult> out;
  const FwPlusInstance inst = make_convex_box_instance();
  guarded(out, "rates", inst.name, [&] {
    if (fw_plus_mode(inst.phi, inst.psis) != FwPlusMode::convex) throw MixedCurvature("expected a convex instance");
    const IterateTrace trace = fw_plus_solve(inst.phi, inst.region, inst.psis, inst.w1, outer(iterations));
    RateContext ctx;
    ctx.curvature_bound = inst.phi_curvature_bound;
    out.push_back(from_certificate("rates", inst.name + " phi bound",
                                   certify_rates(trace, inst.optimum, CertificateKind::appendix_convex_phi, ctx)));
    ctx.curvature_bound = inst.psi_curvature_bound;
    out.push_back(from_certificate("rates", inst.name + " psi bound",
                                   certify_rates(trace, inst.optimum, CertificateKind::appendix_convex_psi, ctx)));
  });
  return out;
}

std::vector<CheckResult> kkt_checks(int iterations, double tol) {
  std::vector<CheckResult> out;
  for (const auto& name : unconstrained_zoo()) {
    guarded(out, "kkt", name, [&] {
      const BenchmarkInstance inst = make_instance(name);
      const IterateTrace trace = cccp_solve(inst.problem, outer(iterations));
      out.push_back(from_certificate("kkt", name + " cccp", certify_kkt(trace, tol), tol));

      const EpigraphLift lift = make_lift(inst.problem);
      const IterateTrace fw = fw_solve(lift.phi(), lift.region(), lift.embed(inst.problem.x_init), outer(iterations));
      double worst = 0.0;
      for (const auto& r : fw.records) {
        worst = std::max(worst, std::abs(r.iterate[lift.base_dim()] - inst.problem.f.value(lift.extract(r.iterate))));
      }
      out.push_back(CheckResult{"kkt", name + " lift t=f", worst <= tol, tol - worst,
                                fmt::format("max |t_k - f(x_k)| = {:.3e}", worst)});
    });
  }
  return out;
}

std::vector<CheckResult> curvature_checks(double tol) {
  std::vector<CheckResult> out;
  auto concave = [&](const std::string& name, const SmoothFn& phi, const Domain& dom) {
    guarded(out, "curvature", name, [&] {
      const CurvatureEstimate est = estimate_curvature(phi, dom);
      out.push_back(CheckResult{"curvature", name, est.sampled_lower_bound <= tol, tol - est.sampled_lower_bound,
                                fmt::format("sampled {:.3e} over {} samples", est.sampled_lower_bound, est.samples)});
    });
  };
  const FwPlusInstance ex = make_concave_exclusion_instance();
  concave("concave exclusion phi", ex.phi, ex.region.domain);
  concave("concave exclusion psi", ex.psis.front(), ex.region.domain);
  concave("concave -|x|^2/2 simplex", SmoothFn::quadratic(-Matrix::Identity(4, 4), Vector::Zero(4)), Domain::simplex(4));
  {
    Lcg64 rng(11);
    const Matrix a = random_psd(rng, 3, 0.0);
    concave("concave -x'Ax ball", SmoothFn::quadratic(-a, Vector::Zero(3)), Domain::l2_ball(Vector::Zero(3), 2.0));
  }
  {
    const BenchmarkInstance ring = make_instance("ring2d:v1");
    const EpigraphLift lift = make_lift(ring.problem);
    concave("ring2d:v1 lifted phi", lift.phi(),
            Domain::box(Vector::Constant(lift.lifted_dim(), -3.0), Vector::Constant(lift.lifted_dim(), 3.0)));
  }

  for (int seed = 1; seed <= 20; ++seed) {
    const std::string name = fmt::format("smooth:{}", seed);
    guarded(out, "curvature", name, [&] {
      Lcg64 rng(static_cast<std::uint64_t>(seed));
      const int n = 2 + seed % 4;
      const SmoothFn phi = SmoothFn::quadratic(random_psd(rng, n, 0.1), rng.uniform_vector(n, -1.0, 1.0));
      Domain dom = Domain::whole_space(n);
      switch (seed % 4) {
        case 0:
          dom = Domain::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
          break;
        case 1:
          dom = Domain::simplex(n, 1.0 + rng.uniform());
          break;
        case 2:
          dom = Domain::l2_ball(rng.uniform_vector(n, -1.0, 1.0), 0.5 + rng.uniform());
          break;
        default: {
          const Vector lo = rng.uniform_vector(n, -2.0, 0.0);
          dom = Domain::box(lo, lo + rng.uniform_vector(n, 0.5, 2.0));
        }
      }
      const CurvatureEstimate est = estimate_curvature(phi, dom, 200, 20, static_cast<std::uint64_t>(seed));
      const double bound = est.analytic_upper_bound.value_or(-kInf);
      out.push_back(CheckResult{"curvature", name, est.sampled_lower_bound <= bound + tol,
                                bound + tol - est.sampled_lower_bound,
                                fmt::format("sampled {:.4g} <= L D^2 = {:.4g} ({})", est.sampled_lower_bound, bound,
                                            dom.describe())});
    });
  }
  return out;
}

BenchmarkInstance make_diag_quadratic_2d() {
  const Matrix a = Vector((Vector(2) << 4.0, 3.0).finished()).asDiagonal();
  const Vector d = (Vector(2) << -2.0, 0.0).finished();
  BenchmarkInstance inst = make_quadratic_dc(a, Vector::Zero(2), 2.0 * Matrix::Identity(2, 2), d, Domain::whole_space(2),
                                             Vector::Constant(2, 1.0));
  inst.name = "diag_quadratic_2d";
  inst.problem.name = inst.name;
  return inst;
}

std::vector<CheckResult> stationarity_checks(double step, int window, double tol, double perturb, double fail_margin) {
  std::vector<CheckResult> out;
  const GridBox box{Vector::Constant(2, -3.0), Vector::Constant(2, 3.0)};
  for (const char* name : {"ring2d:v1", "ring2d:v2", "diag_quadratic_2d"}) {
    guarded(out, "stationarity", name, [&] {
      const BenchmarkInstance inst = std::string(name) == "diag_quadratic_2d" ? make_diag_quadratic_2d() : make_instance(name);
      const DCProblem& p = inst.problem;
      const std::vector<Vector> points = grid_stationary_oracle(p, box, step, window);
      if (points.empty()) throw std::runtime_error("grid oracle found no stationary point");
      for (const auto& x : points) {
        const Certificate c = check_stationarity(p, x, tol);
        out.push_back(from_certificate("stationarity", fmt::format("{} at ({:.4g}, {:.4g})", name, x[0], x[1]), c, tol));
        for (int i = 0; i < 2; ++i) {
          for (double sign : {-1.0, 1.0}) {
            Vector y = x;
            y[i] += sign * perturb;
            if (!p.is_feasible(y)) continue;
            const Certificate q = check_stationarity(p, y, tol);
            out.push_back(CheckResult{"stationarity", fmt::format("{} perturbed to ({:.4g}, {:.4g})", name, y[0], y[1]),
                                      q.worst_margin <= -fail_margin, -fail_margin - q.worst_margin,
                                      fmt::format("margin {:.3e} must be <= {:.1e}", q.worst_margin, -fail_margin)});
          }
        }
      }
    });
  }
  return out;
}

std::vector<CheckResult> connections_checks() {
  std::vector<CheckResult> out;
  for (const auto& name : demo_names()) {
    guarded(out, "connections", name, [&] {
      DemoReport rep = run_demo(name);
      out.insert(out.end(), rep.checks.begin(), rep.checks.end());
    });
  }
  return out;
}

Suite parse_suite(const std::string& name) {
  if (name == "equivalence") return Suite::equivalence;
  if (name == "rates") return Suite::rates;
  if (name == "connections") return Suite::connections;
  if (name == "all") return Suite::all;
  throw std::invalid_argument("unknown suite '" + name + "' (expected equivalence, rates, connections or all)");
}

std::vector<CheckResult> run_suite(Suite suite) {
  std::vector<CheckResult> out;
  auto add = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
  if (suite == Suite::equivalence || suite == Suite::all) {
    spdlog::info("running the equivalence battery");
    add(equivalence_unconstrained());
    add(equivalence_constrained());
  }
  if (suite == Suite::rates || suite == Suite::all) {
    spdlog::info("running the rates battery");
    add(cccp_rate_checks());
    add(fw_plus_concave_rate_checks());
    add(cccp_plus_rate_checks());
    add(fw_plus_convex_rate_checks());
    add(kkt_checks());
    add(curvature_checks());
    add(stationarity_checks());
  }
  if (suite == Suite::connections || suite == Suite::all) {
    spdlog::info("running the connections battery");
    add(connections_checks());
  }
  return out;
}

bool print_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
  std::size_t w_suite = 5, w_name = 4;
  for (const auto& c : checks) {
    w_suite = std::max(w_suite, c.suite.size());
    w_name = std::max(w_name, c.name.size());
  }
  out << fmt::format("{:<{}}  {:<{}}  {:<4}  {:>11}  {}\n", "suite", w_suite, "name", w_name, "ok", "margin", "details");
  int failed = 0;
  for (const auto& c : checks) {
    out << fmt::format("{:<{}}  {:<{}}  {:<4}  {:>11.3e}  {}\n", c.suite, w_suite, c.name, w_name,
                       c.passed ? "PASS" : "FAIL", c.margin, c.details);
    if (!c.passed) ++failed;
  }
  out << fmt::format("{} checks, {} failed\n", checks.size(), failed);
  return failed == 0;
}

}  // namespace dcforge::cli
