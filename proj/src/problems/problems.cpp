#include "dcforge/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dcforge/errors.hpp"
#include "dcforge/kernels.hpp"

namespace dcforge {

Vector DCProblem::constraint_values(const Vector& x) const {
  Vector v(static_cast<Eigen::Index>(constraints.size()));
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = constraints[i].f.value(x) - constraints[i].g.value(x);
  }
  return v;
}

bool DCProblem::is_feasible(const Vector& x, double tol) const {
  if (!domain.contains(x, tol)) return false;
  const Vector v = constraint_values(x);
  return v.size() == 0 || v.maxCoeff() <= tol;
}

void DCProblem::validate(double tol) const {
  const int n = f.dim();
  if (g.dim() != n || domain.dim() != n || x_init.size() != n) {
    throw DimensionMismatch("DCProblem '" + name + "': dimensions disagree");
  }
  for (const auto& c : constraints) {
    if (c.f.dim() != n || c.g.dim() != n) throw DimensionMismatch("DCProblem '" + name + "': constraint dimension");
  }
  if (!is_feasible(x_init, tol)) throw InfeasibleStart("DCProblem '" + name + "': x_init is infeasible");
}

Vector Lcg64::uniform_vector(int n, double lo, double hi) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
  return v;
}

Matrix Lcg64::uniform_matrix(int rows, int cols, double lo, double hi) {
  Matrix m(rows, cols);
  // Row-major fill order is part of the documented generator contract.
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
  }
  return m;
}

double min_sampled_rayleigh(const Matrix& m, int samples, std::uint64_t seed) {
  const auto n = static_cast<int>(m.rows());
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) lowest = std::min(lowest, m(i, i));
  Lcg64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vector v = rng.uniform_vector(n, -1.0, 1.0);
    const double nn = v.squaredNorm();
    if (nn == 0.0) continue;
    lowest = std::min(lowest, v.dot(m * v) / nn);
  }
  return lowest;
}

namespace {

void check_symmetric_psd(const Matrix& m, const char* label) {
  if (m.rows() != m.cols()) throw DimensionMismatch(std::string(label) + " must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw NonSymmetricInput(std::string(label) + " is not symmetric");
  }
  if (min_sampled_rayleigh(m) < -1e-10) throw NotPSD(std::string(label) + " is not positive semidefinite");
}

SmoothFn squared_norm(int n, double scale, const Vector& center, double constant = 0.0) {
  // scale * |x - center|^2 + constant
  return SmoothFn::quadratic(2.0 * scale * Matrix::Identity(n, n), -2.0 * scale * center,
                             scale * center.squaredNorm() + constant);
}

}  // namespace

BenchmarkInstance make_quadratic_dc(const Matrix& a, const Vector& b, const Matrix& c, const Vector& d,
                                    const Domain& domain, std::optional<Vector> x_init) {
  const auto n = b.size();
  if (a.rows() != n || c.rows() != n || d.size() != n || domain.dim() != n) {
    throw DimensionMismatch("make_quadratic_dc: dimensions disagree");
  }
  check_symmetric_psd(a, "A");
  check_symmetric_psd(c, "C");

  BenchmarkInstance inst{.name = "quadratic_dc",
                         .problem = DCProblem{.name = "quadratic_dc",
                                              .f = SmoothFn::quadratic(a, b).with_curvature(Curvature::convex),
                                              .g = SmoothFn::quadratic(c, d).with_curvature(Curvature::convex),
                                              .domain = domain,
                                              .constraints = {},
                                              .x_init = x_init ? *x_init : domain.project(Vector::Zero(n))}};
  const DCProblem& p = inst.problem;

  const Matrix diff = a - c;
  const Eigen::LLT<Matrix> llt(diff);
  if (domain.kind() == DomainKind::whole_space && llt.info() == Eigen::Success &&
      min_sampled_rayleigh(diff) > 0.0) {
    const Vector x_star = llt.solve(d - b);
    inst.known_optimum = KnownOptimum{x_star, p.objective(x_star)};
    inst.known_stationary_points = {x_star};
  }
  p.validate();
  return inst;
}

BenchmarkInstance make_quartic_dc_1d() {
  SmoothFn quartic =
      SmoothFn(
          1, [](const Vector& x) { return std::pow(x[0], 4); },
          [](const Vector& x) -> Vector { return Vector::Constant(1, 4.0 * std::pow(x[0], 3)); }, Curvature::convex)
          .with_hessian([](const Vector& x) -> Matrix { return Matrix::Constant(1, 1, 12.0 * x[0] * x[0]); })
          .with_name("x^4");
  BenchmarkInstance inst{
      .name = "quartic1d",
      .problem = DCProblem{.name = "quartic1d",
                           .f = std::move(quartic),
                           .g = SmoothFn::quadratic(Matrix::Constant(1, 1, 2.0), Vector::Zero(1)).with_name("x^2"),
                           .domain = Domain::whole_space(1),
                           .constraints = {},
                           .x_init = Vector::Constant(1, 1.0)}};
  const DCProblem& p = inst.problem;
  const double r = 1.0 / std::sqrt(2.0);
  inst.known_optimum = KnownOptimum{Vector::Constant(1, r), -0.25};
  inst.known_stationary_points = {Vector::Constant(1, 0.0), Vector::Constant(1, r), Vector::Constant(1, -r)};
  p.validate();
  return inst;
}

double quartic_cccp_map(double x) { return std::cbrt(x / 2.0); }

BenchmarkInstance make_ring_constrained_dc_2d(RingVariant variant) {
  const Vector zero = Vector::Zero(2);
  BenchmarkInstance inst{.name = "",
                         .problem = DCProblem{.name = "",
                                              .f = squared_norm(2, 0.5, zero).with_name("0.5|x|^2"),
                                              .g = SmoothFn::affine(Vector::Ones(2)).with_name("<1,x>"),
                                              .domain = Domain::whole_space(2),
                                              .constraints = {},
                                              .x_init = zero}};
  DCProblem& p = inst.problem;
  if (variant == RingVariant::v1) {
    inst.name = "ring2d:v1";
    const Vector c = (Vector(2) << 1.0, 0.0).finished();
    p.constraints.push_back({squared_norm(2, 1.0, zero), squared_norm(2, 1.0, c)});
    p.x_init = zero;
    const Vector x_star = (Vector(2) << 0.5, 1.0).finished();
    inst.known_optimum = KnownOptimum{x_star, p.objective(x_star)};
    inst.known_stationary_points = {x_star};
  } else {
    inst.name = "ring2d:v2";
    p.constraints.push_back({squared_norm(2, 0.5, zero, 1.0), squared_norm(2, 1.0, zero)});
    p.x_init = (Vector(2) << 2.0, 0.0).finished();
    const Vector x_star = Vector::Ones(2);
    inst.known_optimum = KnownOptimum{x_star, p.objective(x_star)};
    // (-1,-1) satisfies first-order conditions: the objective gradient is a negative
    // multiple of the constraint gradient there.
    inst.known_stationary_points = {x_star, Vector::Constant(2, -1.0)};
  }
  p.name = inst.name;
  p.validate();
  return inst;
}

namespace {

// Quadratic DC data with A - C positive definite (A - C >= 0.5 I).
struct QuadraticData {
  Matrix a, c;
  Vector b, d;
};

QuadraticData seeded_quadratic(Lcg64& rng, int n) {
  const Matrix m = rng.uniform_matrix(n, n, -1.0, 1.0);
  const Matrix k = rng.uniform_matrix(n, n, -1.0, 1.0);
  QuadraticData q;
  q.c = 0.5 * m * m.transpose();
  q.a = q.c + k * k.transpose() + 0.5 * Matrix::Identity(n, n);
  // Exact symmetry keeps the validation tolerance meaningful.
  q.a = 0.5 * (q.a + q.a.transpose()).eval();
  q.c = 0.5 * (q.c + q.c.transpose()).eval();
  q.b = rng.uniform_vector(n, -1.0, 1.0);
  q.d = rng.uniform_vector(n, -1.0, 1.0);
  return q;
}

}  // namespace

BenchmarkInstance make_seeded_quadratic_dc(std::uint64_t seed) {
  Lcg64 rng(seed);
  const int n = 2 + static_cast<int>(rng.uniform() * 4.0);
  const QuadraticData q = seeded_quadratic(rng, n);
  const Vector x0 = rng.uniform_vector(n, -2.0, 2.0);
  BenchmarkInstance inst = make_quadratic_dc(q.a, q.b, q.c, q.d, Domain::whole_space(n), x0);
  inst.name = "quadratic_dc:" + std::to_string(seed);
  inst.problem.name = inst.name;
  return inst;
}

BenchmarkInstance make_seeded_box_quadratic_dc(std::uint64_t seed) {
  Lcg64 rng(seed);
  const int n = 2 + static_cast<int>(rng.uniform() * 4.0);
  QuadraticData q = seeded_quadratic(rng, n);
  // Push the unconstrained minimiser outside the box so bounds become active.
  q.b *= 3.0;
  const Vector x0 = rng.uniform_vector(n, -1.0, 1.0);
  BenchmarkInstance inst = make_quadratic_dc(q.a, q.b, q.c, q.d,
                                             Domain::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)), x0);
  inst.name = "box_quadratic_dc:" + std::to_string(seed);
  inst.problem.name = inst.name;
  return inst;
}

BenchmarkInstance make_seeded_dc_constrained(std::uint64_t seed) {
  Lcg64 rng(seed);
  const int n = 2 + static_cast<int>(rng.uniform() * 3.0);
  const int m = 1 + static_cast<int>(rng.uniform() * 2.0);
  const QuadraticData q = seeded_quadratic(rng, n);

  const std::string name = "dc_constrained:" + std::to_string(seed);
  BenchmarkInstance inst{.name = name,
                         .problem = DCProblem{.name = name,
                                              .f = SmoothFn::quadratic(q.a, q.b).with_curvature(Curvature::convex),
                                              .g = SmoothFn::quadratic(q.c, q.d).with_curvature(Curvature::convex),
                                              .domain = Domain::whole_space(n),
                                              .constraints = {},
                                              .x_init = Vector::Zero(n)}};
  DCProblem& p = inst.problem;
  for (int i = 0; i < m; ++i) {
    // f_i = 0.5 a |x|^2 + <p, x> - 0.5, g_i = 0.5 x'Gx + <h, x>; the difference is an
    // indefinite quadratic that is -0.5 at the origin.
    const double scale = rng.uniform(0.5, 1.5);
    const Vector lin_f = rng.uniform_vector(n, -0.5, 0.5);
    const Matrix r = rng.uniform_matrix(n, n, -1.0, 1.0);
    Matrix gi = r * r.transpose() + 0.1 * Matrix::Identity(n, n);
    gi = 0.5 * (gi + gi.transpose()).eval();
    const Vector lin_g = rng.uniform_vector(n, -0.5, 0.5);
    p.constraints.push_back({SmoothFn::quadratic(scale * Matrix::Identity(n, n), lin_f, -0.5),
                             SmoothFn::quadratic(gi, lin_g).with_curvature(Curvature::convex)});
  }
  p.validate();
  inst.provenance = Provenance::grid_oracle;
  return inst;
}

BenchmarkInstance make_zero_dc(int dim) {
  const Matrix a = Matrix::Identity(dim, dim);
  const Vector b = Vector::Constant(dim, 0.5);
  const Vector x0 = Vector::Constant(dim, 0.25);
  BenchmarkInstance inst = make_quadratic_dc(a, b, a, b, Domain::whole_space(dim), x0);
  inst.name = "zero_dc";
  inst.problem.name = inst.name;
  inst.known_optimum = KnownOptimum{x0, 0.0};
  return inst;
}

namespace {

std::uint64_t parse_seed(const std::string& name, std::size_t colon) {
  const std::string tail = name.substr(colon + 1);
  if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("instance '" + name + "': seed must be a non-negative integer");
  }
  return std::stoull(tail);
}

}  // namespace

BenchmarkInstance make_instance(const std::string& name) {
  if (name == "quartic1d") return make_quartic_dc_1d();
  if (name == "ring2d:v1") return make_ring_constrained_dc_2d(RingVariant::v1);
  if (name == "ring2d:v2") return make_ring_constrained_dc_2d(RingVariant::v2);
  if (name == "zero_dc") return make_zero_dc();
  const auto colon = name.find(':');
  if (colon != std::string::npos) {
    const std::string family = name.substr(0, colon);
    if (family == "quadratic_dc") return make_seeded_quadratic_dc(parse_seed(name, colon));
    if (family == "box_quadratic_dc") return make_seeded_box_quadratic_dc(parse_seed(name, colon));
    if (family == "dc_constrained") return make_seeded_dc_constrained(parse_seed(name, colon));
  }
  throw std::invalid_argument("unknown instance '" + name + "'");
}

std::vector<std::string> zoo_names() {
  return {"quartic1d", "quadratic_dc:<seed>", "box_quadratic_dc:<seed>", "dc_constrained:<seed>",
          "ring2d:v1", "ring2d:v2", "zero_dc"};
}

std::vector<Vector> grid_stationary_oracle(const DCProblem& problem, const GridBox& box, double step, int window) {
  if (window < 1) throw std::invalid_argument("grid_stationary_oracle: window must be >= 1");
  std::vector<Vector> minima = kernels::grid_scan_parallel(problem, box, step).local_minima;
  if (window == 1) return minima;
  const auto n = static_cast<int>(box.lower.size());
  const int span = 2 * window + 1;
  const int total = n == 1 ? span : span * span;
  const double slack = 1e-9 * step;
  std::vector<Vector> kept;
  for (const auto& x : minima) {
    const double fx = problem.objective(x);
    bool minimal = true;
    for (int idx = 0; idx < total && minimal; ++idx) {
      Vector y = x;
      y[0] += (idx % span - window) * step;
      if (n == 2) y[1] += (idx / span - window) * step;
      const bool inside = ((y - box.lower).array() >= -slack).all() && ((box.upper - y).array() >= -slack).all();
      if (inside && problem.is_feasible(y) && problem.objective(y) < fx) minimal = false;
    }
    if (minimal) kept.push_back(x);
  }
  return kept;
}

KnownOptimum grid_best_feasible(const DCProblem& problem, const GridBox& box, double step) {
  auto scan = kernels::grid_scan_parallel(problem, box, step);
  if (scan.feasible_points == 0) throw InfeasiblePoint("grid_best_feasible: no feasible grid point");
  return KnownOptimum{scan.best_point, scan.best_value};
}

std::vector<Vector> cluster_points(const DCProblem& problem, const std::vector<Vector>& points, double radius) {
  std::vector<int> label(points.size(), -1);
  int clusters = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (label[i] >= 0) continue;
    label[i] = clusters;
    std::vector<std::size_t> frontier{i};
    while (!frontier.empty()) {
      const std::size_t cur = frontier.back();
      frontier.pop_back();
      for (std::size_t j = 0; j < points.size(); ++j) {
        if (label[j] < 0 && (points[j] - points[cur]).norm() <= radius) {
          label[j] = clusters;
          frontier.push_back(j);
        }
      }
    }
    ++clusters;
  }
  std::vector<Vector> reps(static_cast<std::size_t>(clusters));
  std::vector<double> best(static_cast<std::size_t>(clusters), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(label[i]);
    const double v = problem.objective(points[i]);
    if (v < best[c]) {
      best[c] = v;
      reps[c] = points[i];
    }
  }
  return reps;
}

}  // namespace dcforge
