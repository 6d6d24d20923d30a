#include <doctest.h>

#include <cmath>

#include "dcforge/analysis.hpp"
#include "dcforge/errors.hpp"
#include "dcforge/solvers.hpp"
#include "dcforge/transforms.hpp"
#include "support.hpp"

using namespace dcforge;
using dcforge::test::max_abs;
using dcforge::test::scalar;
using dcforge::test::vec;

namespace {

SolveConfig iters(int k) {
  SolveConfig cfg;
  cfg.max_outer_iters = k;
  return cfg;
}

}  // namespace

TEST_CASE("inner solver: parabola in closed form") {
  const SmoothFn f = SmoothFn::quadratic(Matrix::Constant(1, 1, 2.0), scalar(-2.0));
  const InnerSolveReport r = inner_convex_solve(f, Domain::whole_space(1), {}, SolveConfig{});
  CHECK(r.status == InnerStatus::converged);
  CHECK(r.x_star[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.residual == 0.0);
}

TEST_CASE("inner solver: half squared norm over the simplex") {
  const SmoothFn f = SmoothFn::quadratic(Matrix::Identity(3, 3), Vector::Zero(3));
  const InnerSolveReport r = inner_convex_solve(f, Domain::simplex(3), {}, SolveConfig{});
  CHECK(r.status == InnerStatus::converged);
  CHECK(max_abs(r.x_star - Vector::Constant(3, 1.0 / 3.0)) < 1e-9);
}

TEST_CASE("inner solver: linear objective on the whole space is unbounded") {
  const InnerSolveReport r = inner_convex_solve(SmoothFn::affine(scalar(1.0)), Domain::whole_space(1), {}, SolveConfig{});
  CHECK(r.status == InnerStatus::unbounded);
}

TEST_CASE("inner solver: Newton on a non-quadratic objective") {
  const auto inst = make_quartic_dc_1d();
  const SmoothFn sub = inst.problem.f.plus_affine(scalar(-2.0));
  const InnerSolveReport r = inner_convex_solve(sub, Domain::whole_space(1), {}, SolveConfig{});
  CHECK(r.status == InnerStatus::converged);
  CHECK(r.x_star[0] == doctest::Approx(quartic_cccp_map(1.0)).epsilon(1e-12));
}

TEST_CASE("inner solver: barrier with a linear constraint") {
  const SmoothFn f = SmoothFn::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  ConvexSubproblem sub{f, Domain::whole_space(2), {LinearConstraint{vec({-1.0, -1.0}), -1.0}}, {}};
  const InnerSolveReport r = inner_convex_solve(sub, vec({2.0, 2.0}), SolveConfig{});
  CHECK(max_abs(r.x_star - vec({0.5, 0.5})) < 1e-8);
}

TEST_CASE("FW on a linear objective over the simplex") {
  const SmoothFn phi = SmoothFn::affine(vec({3.0, 1.0, 2.0}));
  const IterateTrace t = fw_solve(phi, Domain::simplex(3), vec({1.0, 0.0, 0.0}), iters(2));
  REQUIRE(t.records.size() == 2);
  CHECK(*t.records[0].fw_gap == doctest::Approx(2.0));
  CHECK(max_abs(t.records[1].iterate - vec({0.0, 1.0, 0.0})) == 0.0);
  CHECK(*t.records[1].fw_gap == doctest::Approx(0.0));
}

TEST_CASE("FW on a concave quadratic with unit steps decreases monotonically") {
  const Vector c = vec({0.2, -0.3});
  const SmoothFn phi = SmoothFn::quadratic(-Matrix::Identity(2, 2), c, -0.5 * c.squaredNorm());
  const Domain box = Domain::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  const Vector w1 = vec({0.5, 0.5});
  const IterateTrace t = fw_solve(phi, box, w1, iters(10));
  CHECK(max_abs(t.records[1].iterate - box.lmo(phi.grad(w1))) == 0.0);
  for (std::size_t k = 1; k < t.records.size(); ++k) CHECK(t.records[k].objective <= t.records[k - 1].objective);
}

TEST_CASE("FW with harmonic steps meets the convex bound on the simplex") {
  const Vector c = vec({0.5, 0.3, 0.2});
  const SmoothFn phi = SmoothFn::quadratic(Matrix::Identity(3, 3), -c, 0.5 * c.squaredNorm());
  SolveConfig cfg = iters(200);
  cfg.step_rule = StepRule::harmonic();
  const IterateTrace t = fw_solve(phi, Domain::simplex(3), vec({1.0, 0.0, 0.0}), cfg);
  for (const auto& r : t.records) CHECK(r.objective <= 2.0 * 2.0 / (r.k + 1.0) + 1e-12);
}

TEST_CASE("greedy step on a concave restriction is 1") {
  const SmoothFn phi = SmoothFn::quadratic(-Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(StepRule::greedy().step(1, phi, vec({0.1, 0.0}), vec({1.0, 0.0})) == 1.0);
  const SmoothFn convex = SmoothFn::quadratic(Matrix::Identity(1, 1), Vector::Zero(1));
  CHECK(StepRule::greedy().step(1, convex, scalar(-1.0), scalar(1.0)) == doctest::Approx(0.5));
}

TEST_CASE("gap tolerance stops the outer loop") {
  SolveConfig cfg = iters(1000);
  cfg.gap_tol = 1e-6;
  const IterateTrace t = cccp_solve(make_quartic_dc_1d().problem, cfg);
  CHECK(t.status == TraceStatus::gap_tol);
  CHECK(t.records.size() < 1000u);
  CHECK(*t.records.back().dc_gap <= 1e-6);
}

TEST_CASE("CCCP on the quartic") {
  const IterateTrace t = cccp_solve(make_quartic_dc_1d().problem, iters(60));
  CHECK(t.records[1].iterate[0] == doctest::Approx(0.7937005259).epsilon(1e-10));
  CHECK(*t.records[0].dc_gap == doctest::Approx(0.190551).epsilon(1e-6));
  CHECK(t.final_iterate[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("CCCP linear recurrence") {
  // f = x^2, g = 0.5 (x - 1)^2, so 2 x_{k+1} = x_k - 1.
  const auto inst = make_quadratic_dc(Matrix::Constant(1, 1, 2.0), scalar(0.0), Matrix::Identity(1, 1), scalar(-1.0),
                                      Domain::whole_space(1), scalar(0.0));
  const IterateTrace t = cccp_solve(inst.problem, iters(60));
  CHECK(t.records[1].iterate[0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(t.final_iterate[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs((inst.problem.f.grad(scalar(-1.0)) - inst.problem.g.grad(scalar(-1.0)))[0]) == 0.0);
}

TEST_CASE("CCCP on a box clamps the subproblem minimizer") {
  const auto inst = make_quadratic_dc(Matrix::Constant(1, 1, 2.0), scalar(0.0), Matrix::Zero(1, 1), scalar(2.0),
                                      Domain::box(scalar(0.0), scalar(1.0)), scalar(0.0));
  const IterateTrace t = cccp_solve(inst.problem, iters(3));
  CHECK(t.records[1].iterate[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("CCCP+ without constraints delegates to CCCP") {
  const auto p = make_instance("quadratic_dc:4").problem;
  const IterateTrace a = cccp_solve(p, iters(20)), b = cccp_plus_solve(p, iters(20));
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) CHECK(max_abs(a.records[k].iterate - b.records[k].iterate) == 0.0);
}

TEST_CASE("CCCP+ iterates stay feasible") {
  for (const char* name : {"ring2d:v1", "ring2d:v2", "dc_constrained:2"}) {
    CAPTURE(name);
    const auto p = make_instance(name).problem;
    const IterateTrace t = cccp_plus_solve(p, iters(30));
    for (const auto& r : t.records) CHECK(p.is_feasible(r.iterate, 1e-7));
  }
}

TEST_CASE("FW+ with an affine constraint matches FW with a linear constraint") {
  const Vector c = vec({0.4, -0.1});
  const SmoothFn phi = SmoothFn::quadratic(-Matrix::Identity(2, 2), c, 0.0);
  const Domain box = Domain::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  const Vector a = vec({1.0, 2.0});
  const SmoothFn psi = SmoothFn::affine(a, -1.0);
  FeasibleRegion linear = FeasibleRegion::of(box);
  linear.dim = 2;
  linear.linear_constraints.push_back(LinearConstraint{a, 1.0});
  const Vector w1 = vec({0.0, 0.0});
  const IterateTrace plus = fw_plus_solve(phi, FeasibleRegion::of(box), {psi}, w1, iters(10));
  const IterateTrace plain = fw_solve(phi, linear, w1, iters(10));
  REQUIRE(plus.records.size() == plain.records.size());
  for (std::size_t k = 0; k < plus.records.size(); ++k) {
    CHECK(max_abs(plus.records[k].iterate - plain.records[k].iterate) < 1e-8);
  }
}

TEST_CASE("FW+ mode detection") {
  const SmoothFn concave = SmoothFn::quadratic(-Matrix::Identity(2, 2), Vector::Zero(2));
  const SmoothFn convex = SmoothFn::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  const SmoothFn affine = SmoothFn::affine(vec({1.0, 0.0}));
  CHECK(fw_plus_mode(concave, {affine}) == FwPlusMode::concave);
  CHECK(fw_plus_mode(convex, {affine}) == FwPlusMode::convex);
  CHECK_THROWS_AS(fw_plus_mode(concave, {convex}), MixedCurvature);
}

TEST_CASE("FW+ concave mode rejects an infeasible start") {
  const SmoothFn phi = SmoothFn::quadratic(-Matrix::Identity(2, 2), Vector::Zero(2));
  const SmoothFn psi = SmoothFn::affine(vec({1.0, 0.0}), -0.5);
  const Domain box = Domain::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  CHECK_THROWS_AS(fw_plus_solve(phi, FeasibleRegion::of(box), {psi}, vec({1.0, 0.0}), iters(5)), InfeasibleStart);
}

TEST_CASE("solve config validation") {
  SolveConfig cfg;
  cfg.max_outer_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_step_rule("bogus"), std::invalid_argument);
}
