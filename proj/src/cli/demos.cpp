#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "dcforge/cli/battery.hpp"
#include "dcforge/connections.hpp"

namespace dcforge::cli {

namespace {

constexpr double kExact = 1e-12;

Vector scalar(double v) { return Vector::Constant(1, v); }

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// f(x) = 0.5 (x - c)^2 in one dimension.
SmoothFn half_square_1d(double c) { return SmoothFn::quadratic(Matrix::Identity(1, 1), scalar(-c), 0.5 * c * c); }

std::string fmt_vec(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += fmt::format("{}{:.10g}", i ? ", " : "", v[i]);
  return s + ")";
}

class Demo {
 public:
  explicit Demo(std::string name) { report_.name = std::move(name); }

  void paired(const std::string& label, const PairedTrace& p, int rows = 4) {
    report_.lines.push_back(fmt::format("{}: {}", label, p.details));
    const std::size_t n = std::min<std::size_t>(p.fw_path.size(), static_cast<std::size_t>(rows));
    for (std::size_t i = 0; i < n; ++i) {
      report_.lines.push_back(
          fmt::format("  x_{:<3} fw {:<40} direct {}", i + 1, fmt_vec(p.fw_path[i]), fmt_vec(p.direct_path[i])));
    }
    check(label + " agreement", p.passed, p.tolerance - p.max_deviation, p.details);
  }

  void check(const std::string& name, bool ok, double margin, const std::string& details) {
    report_.checks.push_back(CheckResult{"connections", report_.name + ": " + name, ok, margin, details});
  }

  /// |a - b|_inf <= tol.
  void close(const std::string& name, const Vector& a, const Vector& b, double tol) {
    const double d = (a - b).lpNorm<Eigen::Infinity>();
    check(name, d <= tol, tol - d, fmt::format("{} vs {} (|diff| {:.2e}, tol {:.0e})", fmt_vec(a), fmt_vec(b), d, tol));
  }

  void line(std::string s) { report_.lines.push_back(std::move(s)); }

  DemoReport take() { return std::move(report_); }

 private:
  DemoReport report_;
};

DemoReport demo_ppm() {
  Demo d("ppm");
  const SolveConfig cfg;
  const SmoothFn f = half_square_1d(2.0);
  const PairedTrace p = ppm_via_fw(f, BregmanOracle::euclidean(1), scalar(0.0), 20, cfg);
  d.paired("f = (x-2)^2/2, phi = x^2/2, x1 = 0", p);
  d.close("x2 = 1", p.fw_path[1], scalar(1.0), kExact);
  d.close("x3 = 1.5", p.fw_path[2], scalar(1.5), kExact);
  d.close("limit 2", p.fw_path.back(), scalar(2.0), 1e-5);

  const PairedTrace fixed = ppm_via_fw(f, BregmanOracle::euclidean(1), scalar(2.0), 10, cfg);
  d.paired("start at the minimizer", fixed, 2);
  double drift = 0.0;
  for (const auto& x : fixed.fw_path) drift = std::max(drift, std::abs(x[0] - 2.0));
  d.check("constant sequence", drift <= kExact, kExact - drift, fmt::format("max |x_k - 2| = {:.2e}", drift));

  const Vector c = vec({0.1, 0.3, 0.2});
  const PairedTrace ent = ppm_via_fw(SmoothFn::affine(c), BregmanOracle::entropic_box(3, 2.0), Vector::Ones(3), 10, cfg);
  d.paired("entropic phi on (0, 2]^3, f = <c, x>", ent, 3);
  double worst = 0.0;
  for (std::size_t k = 0; k < ent.fw_path.size(); ++k) {
    const Vector closed = (-static_cast<double>(k) * c.array()).exp().matrix();
    worst = std::max(worst, (ent.fw_path[k] - closed).lpNorm<Eigen::Infinity>());
  }
  d.check("multiplicative update", worst <= 1e-8, 1e-8 - worst,
          fmt::format("max |x_k - exp(-(k-1) c)| = {:.2e}", worst));
  return d.take();
}

DemoReport demo_mirror() {
  Demo d("mirror");
  const SolveConfig cfg;
  const auto unit = [](int) { return 1.0; };

  const SmoothFn f = half_square_1d(2.0);
  const PairedTrace gd = mirror_descent_via_fw(f, BregmanOracle::euclidean(1), scalar(0.0), unit, 10, cfg);
  d.paired("f = (x-2)^2/2, phi = x^2/2, unit steps", gd);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < gd.fw_path.size(); ++k) {
    const Vector step = gd.fw_path[k] - f.grad(gd.fw_path[k]);
    worst = std::max(worst, (gd.fw_path[k + 1] - step).lpNorm<Eigen::Infinity>());
  }
  d.check("gradient step x - grad f(x) / L", worst <= kExact, kExact - worst, fmt::format("max deviation {:.2e}", worst));
  d.close("x2 = 2", gd.fw_path[1], scalar(2.0), kExact);

  const SmoothFn sq = SmoothFn::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  const PairedTrace one = mirror_descent_via_fw(sq, BregmanOracle::euclidean(2), vec({3.0, -1.0}), unit, 3, cfg);
  d.paired("f = |x|^2/2 in R^2", one, 2);
  d.close("x2 = 0", one.fw_path[1], Vector::Zero(2), kExact);

  const double lip = 4.0;
  const SmoothFn aniso = SmoothFn::quadratic(Vector(vec({1.0, 3.0})).asDiagonal(), vec({-1.0, 0.5}));
  const PairedTrace gd4 = mirror_descent_via_fw(aniso, BregmanOracle::euclidean(2, lip), vec({1.0, 1.0}), unit, 10, cfg);
  d.paired("f = x'diag(1,3)x/2 + b'x, phi = 2|x|^2", gd4, 2);
  worst = 0.0;
  for (std::size_t k = 0; k + 1 < gd4.fw_path.size(); ++k) {
    const Vector step = gd4.fw_path[k] - aniso.grad(gd4.fw_path[k]) / lip;
    worst = std::max(worst, (gd4.fw_path[k + 1] - step).lpNorm<Eigen::Infinity>());
  }
  d.check("gradient step with L = 4", worst <= kExact, kExact - worst, fmt::format("max deviation {:.2e}", worst));

  const Vector c = vec({0.1, 0.3, 0.2});
  const PairedTrace eg =
      mirror_descent_via_fw(SmoothFn::affine(c), BregmanOracle::entropic_simplex(3), Vector::Constant(3, 1.0 / 3.0), unit,
                            10, cfg);
  d.paired("entropic phi on the simplex, f = <c, x>", eg, 3);
  worst = 0.0;
  for (std::size_t k = 0; k < eg.fw_path.size(); ++k) {
    Vector w = (-static_cast<double>(k) * c.array()).exp().matrix();
    w /= w.sum();
    worst = std::max(worst, (eg.fw_path[k] - w).lpNorm<Eigen::Infinity>());
  }
  d.check("exponentiated gradient", worst <= 1e-8, 1e-8 - worst, fmt::format("max deviation {:.2e}", worst));
  return d.take();
}

DemoReport demo_proxgrad() {
  Demo d("proxgrad");
  const SolveConfig cfg;
  const SmoothFn f = half_square_1d(2.0);

  const PairedTrace soft = prox_grad_via_fw(f, ProxOracle::l1(1), scalar(0.0), 10, cfg);
  d.paired("f = (x-2)^2/2, g = |x|, x1 = 0", soft);
  d.close("x2 = soft(2, 1) = 1", soft.fw_path[1], scalar(1.0), kExact);
  d.close("fixed point 1", soft.fw_path.back(), scalar(1.0), kExact);
  const double x = soft.fw_path.back()[0];
  const double optimality = std::abs((x - 2.0) + 1.0);
  d.check("0 in f'(x*) + d|x*|", optimality <= kExact, kExact - optimality,
          fmt::format("(x* - 2) + sign(x*) = {:.2e}", optimality));

  const PairedTrace zero = prox_grad_via_fw(f, ProxOracle::zero(1), scalar(0.0), 10, cfg);
  d.paired("g = 0", zero, 3);
  d.close("gradient descent reaches 2", zero.fw_path[1], scalar(2.0), kExact);

  const SmoothFn f2 = half_square_1d(-1.0);
  const PairedTrace box = prox_grad_via_fw(f2, ProxOracle::box_indicator(scalar(0.0), scalar(1.0)), scalar(1.0), 10, cfg);
  d.paired("f = (x+1)^2/2, g = indicator [0, 1]", box, 3);
  d.close("projected fixed point 0", box.fw_path.back(), scalar(0.0), kExact);
  return d.take();
}

DemoReport demo_dualprox() {
  Demo d("dualprox");
  const ProxOracle f = ProxOracle::half_square(scalar(0.0));
  const ProxOracle g = ProxOracle::half_square(scalar(1.0));

  auto residual_check = [&](const std::string& label, const IterateTrace& t) {
    double worst = 0.0;
    for (const auto& r : t.records) worst = std::max(worst, r.kkt_residual.value_or(std::numeric_limits<double>::infinity()));
    d.check(label + " relation residual", worst <= 1e-10, 1e-10 - worst,
            fmt::format("max |prox_g(x*) - prox_f(x_k)| = {:.2e}", worst));
  };

  const IterateTrace unit = dual_cccp_prox(f, g, 0.0, [](int) { return 1.0; }, 10);
  d.line("f = x^2/2, g = (x-1)^2/2, eta = 1:");
  double worst = 0.0;
  for (const auto& r : unit.records) {
    d.line(fmt::format("  x_{:<3} {:.10g}  residual {:.2e}", r.k, r.iterate[0], *r.kkt_residual));
    worst = std::max(worst, std::abs(r.iterate[0] - (1.0 - r.k)));
  }
  residual_check("eta = 1", unit);
  d.check("x_k+1 = x_k - 1", worst <= kExact, kExact - worst, fmt::format("max |x_k - (1 - k)| = {:.2e}", worst));

  const IterateTrace half = dual_cccp_prox(f, g, 0.0, [](int) { return 0.5; }, 10);
  residual_check("eta = 1/2", half);
  worst = 0.0;
  for (const auto& r : half.records) worst = std::max(worst, std::abs(r.iterate[0] + 0.5 * (r.k - 1)));
  d.check("x_k+1 = x_k - 1/2", worst <= kExact, kExact - worst, fmt::format("max deviation {:.2e}", worst));

  const IterateTrace same = dual_cccp_prox(g, g, 0.7, [](int) { return 1.0; }, 10);
  residual_check("f = g", same);
  worst = 0.0;
  for (const auto& r : same.records) worst = std::max(worst, std::abs(r.iterate[0] - 0.7));
  d.check("f = g keeps x constant", worst <= kExact, kExact - worst, fmt::format("max |x_k - 0.7| = {:.2e}", worst));
  return d.take();
}

DemoReport demo_fwascccp() {
  Demo d("fwascccp");
  const SolveConfig cfg;

  const PairedTrace lin = fw_as_cccp(SmoothFn::affine(vec({1.0, 3.0, 2.0})), Domain::simplex(3),
                                     Vector::Constant(3, 1.0 / 3.0), 5, cfg);
  d.paired("g = <(1,3,2), x> on the simplex", lin, 3);
  d.close("best vertex after one step", lin.fw_path[1], vec({0.0, 1.0, 0.0}), 0.0);

  const Vector c = vec({3.0, -2.0});
  const SmoothFn g = SmoothFn::quadratic(-Matrix::Identity(2, 2), c, -0.5 * c.squaredNorm());
  const PairedTrace box =
      fw_as_cccp(g, Domain::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)), Vector::Zero(2), 20, cfg);
  d.paired("g = -|x - (3,-2)|^2/2 on [-1, 1]^2", box, 3);
  d.check("identical iterates", box.max_deviation == 0.0, 0.0 - box.max_deviation + 0.0,
          fmt::format("max deviation {:.2e}", box.max_deviation));

  const PairedTrace tie = fw_as_cccp(SmoothFn::affine(vec({2.0, 2.0, 1.0})), Domain::simplex(3),
                                     Vector::Constant(3, 1.0 / 3.0), 3, cfg);
  d.paired("tie between two vertices", tie, 2);
  d.close("lowest-index vertex", tie.fw_path[1], vec({1.0, 0.0, 0.0}), 0.0);
  d.check("identical iterates (tie)", tie.max_deviation == 0.0, 0.0 - tie.max_deviation + 0.0,
          fmt::format("max deviation {:.2e}", tie.max_deviation));
  return d.take();
}

}  // namespace

bool DemoReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> demo_names() { return {"ppm", "mirror", "proxgrad", "dualprox", "fwascccp"}; }

DemoReport run_demo(const std::string& name) {
  if (name == "ppm") return demo_ppm();
  if (name == "mirror") return demo_mirror();
  if (name == "proxgrad") return demo_proxgrad();
  if (name == "dualprox") return demo_dualprox();
  if (name == "fwascccp") return demo_fwascccp();
  throw std::invalid_argument("unknown demo '" + name + "' (expected ppm, mirror, proxgrad, dualprox or fwascccp)");
}

}  // namespace dcforge::cli
