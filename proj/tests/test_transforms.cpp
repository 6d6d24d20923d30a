#include <doctest.h>

#include <fmt/format.h>

#include "dcforge/analysis.hpp"
#include "dcforge/errors.hpp"
#include "dcforge/transforms.hpp"
#include "support.hpp"

using namespace dcforge;
using dcforge::test::max_abs;
using dcforge::test::scalar;
using dcforge::test::vec;

TEST_CASE("quartic lift at x = 1") {
  const auto inst = make_quartic_dc_1d();
  const EpigraphLift lift = make_lift(inst.problem);
  CHECK(lift.kind() == LiftKind::basic);
  CHECK(lift.lifted_dim() == 2);
  const Vector w = lift.embed(scalar(1.0));
  CHECK(max_abs(w - vec({1.0, 1.0})) == 0.0);
  CHECK(lift.phi().value(w) == 0.0);
  CHECK(is_concave(lift.phi().curvature()));
}

TEST_CASE("ring variant 1 lift at the origin") {
  const auto inst = make_ring_constrained_dc_2d(RingVariant::v1);
  const EpigraphLift lift = make_lift(inst.problem);
  CHECK(lift.kind() == LiftKind::dc_constrained);
  CHECK(lift.lifted_dim() == 4);
  REQUIRE(lift.num_constraints() == 1);
  const Vector w = lift.embed(vec({0.0, 0.0}));
  CHECK(max_abs(w) == 0.0);
  CHECK(lift.psis()[0].value(w) == doctest::Approx(-1.0));
  CHECK(lift.is_feasible(w));
}

TEST_CASE("lift kinds are checked against the problem") {
  const auto quartic = make_quartic_dc_1d();
  CHECK_THROWS_AS(make_lift(quartic.problem, LiftKind::convex_constrained), UnsupportedDomain);
  const auto ring = make_ring_constrained_dc_2d();
  CHECK_THROWS_AS(make_lift(ring.problem, LiftKind::convex_constrained), HasConstraints);
  const auto boxed = make_instance("box_quadratic_dc:1");
  CHECK_THROWS_AS(make_lift(boxed.problem, LiftKind::basic), UnsupportedDomain);
  CHECK(make_lift(boxed.problem).kind() == LiftKind::convex_constrained);
}

TEST_CASE("embed and extract round-trip and phi matches the objective") {
  for (const char* name : {"quartic1d", "quadratic_dc:2", "box_quadratic_dc:3", "ring2d:v2", "dc_constrained:1"}) {
    CAPTURE(name);
    const auto inst = make_instance(name);
    const EpigraphLift lift = make_lift(inst.problem);
    Lcg64 rng(9);
    for (int i = 0; i < 20; ++i) {
      Vector x = rng.uniform_vector(inst.problem.dim(), -1.0, 1.0);
      if (inst.problem.domain.kind() != DomainKind::whole_space) x = inst.problem.domain.project(x);
      const Vector w = lift.embed(x);
      CHECK(max_abs(lift.extract(w) - x) == 0.0);
      CHECK(lift.phi().value(w) == doctest::Approx(inst.problem.objective(x)).epsilon(1e-12));
      CHECK(lift.t_components(w)[0] == doctest::Approx(inst.problem.f.value(x)).epsilon(1e-14));
      CHECK(lift.is_feasible(w) == inst.problem.is_feasible(x));
    }
  }
}

TEST_CASE("indicator reduction: FW on the box lift follows CCCP") {
  SolveConfig cfg;
  cfg.max_outer_iters = 20;
  for (int s = 1; s <= 20; ++s) {
    const auto inst = make_instance(fmt::format("box_quadratic_dc:{}", s));
    CAPTURE(inst.name);
    const Certificate c = certify_equivalence(inst.problem, cfg, 20, 1e-8);
    CHECK(c.passed);
  }
}
