#include <doctest.h>

#include <cmath>

#include "dcforge/errors.hpp"
#include "dcforge/kernels.hpp"
#include "dcforge/problems.hpp"
#include "support.hpp"

using namespace dcforge;
using dcforge::test::concrete_zoo;
using dcforge::test::max_abs;
using dcforge::test::scalar;
using dcforge::test::vec;

TEST_CASE("one-dimensional quadratic DC has the closed-form optimum") {
  const auto inst = make_quadratic_dc(Matrix::Constant(1, 1, 2.0), scalar(0.0), Matrix::Identity(1, 1), scalar(-1.0),
                                      Domain::whole_space(1));
  REQUIRE(inst.known_optimum);
  CHECK(inst.known_optimum->x_star[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(inst.known_optimum->f_star == doctest::Approx(inst.problem.objective(scalar(-1.0))).epsilon(1e-14));
}

TEST_CASE("A = C and b = d gives an identically zero objective") {
  const Matrix a = (Matrix(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
  const Vector b = vec({0.3, -0.7});
  const auto inst = make_quadratic_dc(a, b, a, b, Domain::whole_space(2));
  CHECK_FALSE(inst.known_optimum);
  Lcg64 rng(3);
  for (int i = 0; i < 20; ++i) CHECK(inst.problem.objective(rng.uniform_vector(2, -5.0, 5.0)) == 0.0);
}

TEST_CASE("two-dimensional quadratic DC solves (A - C) x = d - b") {
  const Matrix a = Vector(vec({4.0, 3.0})).asDiagonal();
  const auto inst =
      make_quadratic_dc(a, Vector::Zero(2), 2.0 * Matrix::Identity(2, 2), vec({-2.0, 0.0}), Domain::whole_space(2));
  REQUIRE(inst.known_optimum);
  CHECK(max_abs(inst.known_optimum->x_star - vec({-1.0, 0.0})) < 1e-14);
}

TEST_CASE("quadratic inputs are validated") {
  const Matrix asym = (Matrix(2, 2) << 1.0, 0.3, 0.0, 1.0).finished();
  CHECK_THROWS_AS(make_quadratic_dc(asym, Vector::Zero(2), Matrix::Identity(2, 2), Vector::Zero(2), Domain::whole_space(2)),
                  NonSymmetricInput);
  const Matrix indef = Vector(vec({1.0, -1.0})).asDiagonal();
  CHECK_THROWS_AS(make_quadratic_dc(indef, Vector::Zero(2), Matrix::Identity(2, 2), Vector::Zero(2), Domain::whole_space(2)),
                  NotPSD);
}

TEST_CASE("quartic instance and its CCCP map") {
  const auto inst = make_quartic_dc_1d();
  CHECK(inst.problem.objective(scalar(1.0)) == 0.0);
  CHECK(quartic_cccp_map(1.0) == doctest::Approx(0.7937005259).epsilon(1e-10));
  REQUIRE(inst.known_optimum);
  CHECK(inst.known_optimum->f_star == doctest::Approx(-0.25));
}

TEST_CASE("every zoo instance resolves and validates") {
  for (const auto& name : concrete_zoo()) {
    CAPTURE(name);
    const auto inst = make_instance(name);
    CHECK_NOTHROW(inst.problem.validate());
    CHECK(inst.problem.is_feasible(inst.problem.x_init));
  }
  CHECK_THROWS(make_instance("no_such_instance"));
}

TEST_CASE("seeded instances are reproducible") {
  Lcg64 a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  const auto p = make_seeded_quadratic_dc(5), q = make_seeded_quadratic_dc(5), r = make_seeded_quadratic_dc(6);
  const Vector x = Vector::Constant(p.problem.dim(), 0.3);
  CHECK(p.problem.objective(x) == q.problem.objective(x));
  CHECK(p.problem.objective(x) != r.problem.objective(x));
}

TEST_CASE("ring variants") {
  const auto v1 = make_ring_constrained_dc_2d(RingVariant::v1);
  CHECK(v1.problem.constraint_values(vec({0.0, 0.0}))[0] == doctest::Approx(-1.0));
  CHECK_FALSE(v1.problem.is_feasible(vec({1.0, 0.0})));
  const auto v2 = make_ring_constrained_dc_2d(RingVariant::v2);
  CHECK(v2.problem.is_feasible(vec({2.0, 0.0})));
  CHECK_FALSE(v2.problem.is_feasible(vec({0.5, 0.5})));
}

TEST_CASE("an infeasible start is rejected") {
  auto inst = make_ring_constrained_dc_2d(RingVariant::v1);
  inst.problem.x_init = vec({2.0, 0.0});
  CHECK_THROWS_AS(inst.problem.validate(), InfeasibleStart);
}

TEST_CASE("grid oracle finds the quartic minima") {
  const auto inst = make_quartic_dc_1d();
  const GridBox box{scalar(-2.0), scalar(2.0)};
  const auto pts = cluster_points(inst.problem, grid_stationary_oracle(inst.problem, box, 1e-4), 0.05);
  REQUIRE(pts.size() == 2);
  for (const auto& p : pts) CHECK(std::abs(std::abs(p[0]) - std::sqrt(0.5)) <= 2e-4);
}

TEST_CASE("grid oracle returns every point of a constant objective") {
  const auto inst = make_zero_dc(2);
  const GridBox box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)};
  CHECK(grid_stationary_oracle(inst.problem, box, 0.1).size() == 21u * 21u);
}

TEST_CASE("grid oracle on ring variant 1 gives one cluster") {
  const auto inst = make_ring_constrained_dc_2d(RingVariant::v1);
  const GridBox box{Vector::Constant(2, -3.0), Vector::Constant(2, 3.0)};
  const auto pts = cluster_points(inst.problem, grid_stationary_oracle(inst.problem, box, 0.01), 0.05);
  REQUIRE(pts.size() == 1);
  CHECK(max_abs(pts[0] - vec({0.5, 1.0})) <= 0.01);
}

TEST_CASE("grid best feasible point") {
  const auto inst = make_ring_constrained_dc_2d(RingVariant::v2);
  const GridBox box{Vector::Constant(2, -3.0), Vector::Constant(2, 3.0)};
  const KnownOptimum opt = grid_best_feasible(inst.problem, box, 0.01);
  CHECK(inst.problem.is_feasible(opt.x_star));
  CHECK(opt.f_star == doctest::Approx(inst.problem.objective(opt.x_star)));
  CHECK(max_abs(opt.x_star - vec({1.0, 1.0})) <= 0.01);
}

TEST_CASE("serial and parallel kernels agree") {
  for (const char* name : {"ring2d:v1", "ring2d:v2", "quadratic_dc:1"}) {
    CAPTURE(name);
    const auto inst = make_instance(name);
    if (inst.problem.dim() != 2) continue;
    const GridBox box{Vector::Constant(2, -2.0), Vector::Constant(2, 2.0)};
    const auto s = kernels::grid_scan_serial(inst.problem, box, 0.02);
    const auto p = kernels::grid_scan_parallel(inst.problem, box, 0.02);
    CHECK(s.best_value == p.best_value);
    CHECK(s.feasible_points == p.feasible_points);
    REQUIRE(s.local_minima.size() == p.local_minima.size());
    for (std::size_t i = 0; i < s.local_minima.size(); ++i) CHECK(s.local_minima[i] == p.local_minima[i]);
  }
  const SmoothFn phi = SmoothFn::quadratic(Matrix::Identity(3, 3), vec({0.1, -0.2, 0.3}));
  Lcg64 rng(11);
  std::vector<kernels::PointPair> pairs;
  for (int i = 0; i < 200; ++i) pairs.emplace_back(rng.uniform_vector(3, -1.0, 1.0), rng.uniform_vector(3, -1.0, 1.0));
  const std::vector<double> etas{0.1, 0.5, 1.0};
  CHECK(kernels::curvature_sup_serial(phi, pairs, etas) == kernels::curvature_sup_parallel(phi, pairs, etas));
}
