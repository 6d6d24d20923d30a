#include <doctest.h>

#include <cmath>

#include "dcforge/analysis.hpp"
#include "dcforge/errors.hpp"
#include "dcforge/transforms.hpp"
#include "support.hpp"

using namespace dcforge;
using dcforge::test::concrete_zoo;
using dcforge::test::max_abs;
using dcforge::test::scalar;
using dcforge::test::vec;

TEST_CASE("dc gap") {
  const auto p = make_quartic_dc_1d().problem;
  CHECK(dc_gap(p, scalar(1.0), scalar(quartic_cccp_map(1.0))) == doctest::Approx(0.190551).epsilon(1e-6));
  CHECK(dc_gap(p, scalar(0.4), scalar(0.4)) == 0.0);
  const auto z = make_zero_dc(2).problem;
  SolveConfig cfg;
  cfg.max_outer_iters = 5;
  for (const auto& r : cccp_solve(z, cfg).records) CHECK(*r.dc_gap == 0.0);
}

TEST_CASE("FW gap over the simplex") {
  const SmoothFn phi = SmoothFn::affine(vec({3.0, 1.0, 2.0}));
  const FeasibleRegion region = FeasibleRegion::of(Domain::simplex(3));
  CHECK(fw_gap(phi, region, vec({1.0, 0.0, 0.0}), SolveConfig{}) == doctest::Approx(2.0));
  CHECK(fw_gap(phi, region, vec({0.0, 1.0, 0.0}), SolveConfig{}) == doctest::Approx(0.0));
}

TEST_CASE("FW gap of the lift equals the dc gap at the CCCP iterate") {
  for (const char* name : {"quartic1d", "quadratic_dc:1", "quadratic_dc:7"}) {
    CAPTURE(name);
    const auto p = make_instance(name).problem;
    SolveConfig cfg;
    cfg.max_outer_iters = 5;
    const IterateTrace t = cccp_solve(p, cfg);
    const EpigraphLift lift = make_lift(p);
    for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
      const double g = fw_gap(lift, lift.embed(t.records[k].iterate), cfg);
      CHECK(g == doctest::Approx(*t.records[k].dc_gap).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("curvature of a half square on the unit interval") {
  const SmoothFn phi = SmoothFn::quadratic(Matrix::Identity(1, 1), scalar(0.0)).with_lipschitz(1.0);
  const CurvatureEstimate e = estimate_curvature(phi, Domain::box(scalar(0.0), scalar(1.0)));
  CHECK(e.sampled_lower_bound == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(e.analytic_upper_bound);
  CHECK(*e.analytic_upper_bound == doctest::Approx(1.0));
}

TEST_CASE("sampled curvature properties") {
  const Domain ball = Domain::l2_ball(Vector::Zero(3), 2.0);
  const SmoothFn concave = SmoothFn::quadratic(-Matrix::Identity(3, 3), vec({1.0, 0.0, -1.0}));
  CHECK(estimate_curvature(concave, ball).sampled_lower_bound <= 1e-9);
  const SmoothFn affine = SmoothFn::affine(vec({1.0, 2.0, 3.0}));
  CHECK(std::abs(estimate_curvature(affine, ball).sampled_lower_bound) <= 1e-9);
  Lcg64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Matrix m = rng.uniform_matrix(3, 3, -1.0, 1.0);
    const Matrix h = m.transpose() * m;
    const double lip = h.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
    const SmoothFn phi = SmoothFn::quadratic(h, rng.uniform_vector(3, -1.0, 1.0)).with_lipschitz(lip);
    const CurvatureEstimate e = estimate_curvature(phi, ball);
    REQUIRE(e.analytic_upper_bound);
    CHECK(e.sampled_lower_bound <= *e.analytic_upper_bound + 1e-9);
    CHECK(e.sampled_lower_bound >= 0.0);
  }
  CHECK_THROWS_AS(estimate_curvature(concave, Domain::whole_space(3)), UnboundedDomain);
}

TEST_CASE("gradient oracles match finite differences") {
  for (const auto& name : concrete_zoo()) {
    CAPTURE(name);
    const auto p = make_instance(name).problem;
    Lcg64 rng(13);
    std::vector<Vector> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(rng.uniform_vector(p.dim(), -1.5, 1.5));
    CHECK(gradient_check(p.f, pts) < 1e-6);
    CHECK(gradient_check(p.g, pts) < 1e-6);
    for (const auto& c : p.constraints) {
      CHECK(gradient_check(c.f, pts) < 1e-6);
      CHECK(gradient_check(c.g, pts) < 1e-6);
    }
  }
}

TEST_CASE("stationarity on the quartic") {
  const auto p = make_quartic_dc_1d().problem;
  CHECK(check_stationarity(p, scalar(std::sqrt(0.5)), 1e-6).worst_margin >= -1e-6);
  const Certificate c = check_stationarity(p, scalar(1.0), 1e-6);
  CHECK_FALSE(c.passed);
  CHECK(c.worst_margin == doctest::Approx(-0.190551).epsilon(1e-5));
}

TEST_CASE("stationarity at a quadratic optimum") {
  const auto inst = make_instance("quadratic_dc:2");
  const Certificate c = check_stationarity(inst.problem, inst.known_optimum->x_star, 1e-6);
  CHECK(c.passed);
  CHECK(std::abs(c.worst_margin) <= 1e-9);
}

TEST_CASE("stationarity of an infeasible point throws") {
  const auto p = make_ring_constrained_dc_2d(RingVariant::v1).problem;
  CHECK_THROWS_AS(check_stationarity(p, vec({2.0, 0.0}), 1e-6), InfeasiblePoint);
}

TEST_CASE("rate certificates") {
  const auto inst = make_quartic_dc_1d();
  SolveConfig cfg;
  cfg.max_outer_iters = 200;
  const IterateTrace t = cccp_solve(inst.problem, cfg);
  const Certificate c = certify_rates(t, inst.known_optimum, CertificateKind::corollary2_rate);
  CHECK(c.passed);
  CHECK(c.applicable);
  const Certificate none = certify_rates(t, std::nullopt, CertificateKind::corollary2_rate);
  CHECK_FALSE(none.applicable);
  CHECK(none.passed);
  const auto records = gap_records(t, inst.known_optimum->f_star);
  REQUIRE(records.size() == t.records.size());
  for (const auto& r : records) {
    REQUIRE(r.bound_rhs);
    CHECK(r.min_gap_so_far <= *r.bound_rhs);
    CHECK(*r.bound_rhs == doctest::Approx(0.25 / r.iteration));
  }
}

TEST_CASE("KKT certificate") {
  SolveConfig cfg;
  cfg.max_outer_iters = 30;
  const IterateTrace t = cccp_solve(make_instance("quadratic_dc:3").problem, cfg);
  CHECK(certify_kkt(t, 1e-8).passed);
  for (const auto& r : t.records) CHECK(r.kkt_residual.has_value());
}

TEST_CASE("equivalence certificate") {
  SolveConfig cfg;
  cfg.max_outer_iters = 50;
  CHECK(certify_equivalence(make_quartic_dc_1d().problem, cfg, 50, 1e-8).passed);
  const auto z = make_zero_dc(2).problem;
  cfg.max_outer_iters = 5;
  const IterateTrace t = cccp_solve(z, cfg);
  for (const auto& r : t.records) CHECK(max_abs(r.iterate - z.x_init) == 0.0);
  CHECK(certify_equivalence(z, cfg, 5).passed);
}

TEST_CASE("certificate names round-trip") {
  for (auto k : {CertificateKind::lemma1_rate, CertificateKind::corollary2_rate, CertificateKind::theorem3_rate,
                 CertificateKind::corollary6_rate, CertificateKind::appendix_convex_phi,
                 CertificateKind::appendix_convex_psi, CertificateKind::equivalence, CertificateKind::kkt,
                 CertificateKind::stationarity}) {
    CHECK(parse_certificate_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_certificate_kind("nope"), std::invalid_argument);
}
