#include <doctest.h>

#include <cmath>

#include "dcforge/connections.hpp"
#include "dcforge/errors.hpp"
#include "support.hpp"

using namespace dcforge;
using dcforge::test::max_abs;
using dcforge::test::scalar;
using dcforge::test::vec;

namespace {

SmoothFn half_square_1d(double c) { return SmoothFn::quadratic(Matrix::Identity(1, 1), scalar(-c), 0.5 * c * c); }

const auto unit = [](int) { return 1.0; };

}  // namespace

TEST_CASE("proximal point through FW") {
  const PairedTrace p = ppm_via_fw(half_square_1d(2.0), BregmanOracle::euclidean(1), scalar(0.0), 20, SolveConfig{});
  CHECK(p.passed);
  CHECK(p.fw_path[1][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.fw_path[2][0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(p.fw_path.back()[0] == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("mirror descent through FW recovers gradient descent") {
  const PairedTrace p = mirror_descent_via_fw(half_square_1d(2.0), BregmanOracle::euclidean(1), scalar(0.0), unit, 5,
                                              SolveConfig{});
  CHECK(p.passed);
  CHECK(p.fw_path[1][0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.fw_path[2][0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("mirror descent with a fractional step") {
  const auto half = [](int) { return 0.5; };
  const SmoothFn f = SmoothFn::quadratic(Matrix::Identity(2, 2), vec({-1.0, 0.5}));
  const PairedTrace euclid = mirror_descent_via_fw(f, BregmanOracle::euclidean(2), vec({1.0, 1.0}), half, 10, SolveConfig{});
  CHECK(euclid.passed);
  // With a non-Euclidean generator the two recursions differ unless the step is 1.
  const SmoothFn lin = SmoothFn::affine(vec({0.1, 0.3, 0.2}));
  const PairedTrace ent = mirror_descent_via_fw(lin, BregmanOracle::entropic_simplex(3), Vector::Constant(3, 1.0 / 3.0),
                                                half, 10, SolveConfig{});
  CHECK_FALSE(ent.passed);
  CHECK(ent.max_deviation > 1e-3);
}

TEST_CASE("proximal gradient through FW") {
  const SmoothFn f = half_square_1d(2.0).with_lipschitz(1.0);
  const PairedTrace soft = prox_grad_via_fw(f, ProxOracle::l1(1), scalar(0.0), 10, SolveConfig{});
  CHECK(soft.passed);
  CHECK(soft.fw_path[1][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(soft.fw_path.back()[0] == doctest::Approx(1.0).epsilon(1e-12));
  // Subdifferential optimality at 1: f'(1) + sign(1) = 0.
  CHECK(f.grad(scalar(1.0))[0] + 1.0 == 0.0);

  const PairedTrace gd = prox_grad_via_fw(f, ProxOracle::zero(1), scalar(0.0), 5, SolveConfig{});
  CHECK(gd.passed);
  CHECK(gd.fw_path[1][0] == doctest::Approx(2.0).epsilon(1e-12));

  const SmoothFn g = half_square_1d(-1.0).with_lipschitz(1.0);
  const PairedTrace box = prox_grad_via_fw(g, ProxOracle::box_indicator(scalar(0.0), scalar(1.0)), scalar(1.0), 5,
                                           SolveConfig{});
  CHECK(box.passed);
  CHECK(std::abs(box.fw_path.back()[0]) <= 1e-12);
}

TEST_CASE("dual prox CCCP") {
  const ProxOracle f = ProxOracle::half_square(scalar(0.0));
  const ProxOracle g = ProxOracle::half_square(scalar(1.0));
  const IterateTrace t = dual_cccp_prox(f, g, 0.0, unit, 5);
  REQUIRE(t.records.size() >= 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(t.records[k].iterate[0] == doctest::Approx(-static_cast<double>(k)).epsilon(1e-10).scale(1.0));
    REQUIRE(t.records[k].kkt_residual);
    CHECK(*t.records[k].kkt_residual <= 1e-10);
  }
  const IterateTrace same = dual_cccp_prox(f, f, 0.7, unit, 5);
  for (const auto& r : same.records) CHECK(r.iterate[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("FW as CCCP") {
  const PairedTrace lin = fw_as_cccp(SmoothFn::affine(vec({-3.0, -1.0, -2.0})), Domain::simplex(3),
                                     Vector::Constant(3, 1.0 / 3.0), 3, SolveConfig{});
  CHECK(lin.passed);
  CHECK(max_abs(lin.fw_path[1] - vec({0.0, 1.0, 0.0})) == 0.0);

  const Vector c = vec({3.0, -2.5});
  const SmoothFn g = SmoothFn::quadratic(-Matrix::Identity(2, 2), c, -0.5 * c.squaredNorm());
  const Domain box = Domain::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  const PairedTrace far = fw_as_cccp(g, box, vec({0.2, 0.1}), 20, SolveConfig{});
  CHECK(far.passed);
  CHECK(far.max_deviation == 0.0);

  const PairedTrace tie = fw_as_cccp(SmoothFn::affine(vec({1.0, 1.0, 0.0})), Domain::simplex(3),
                                     Vector::Constant(3, 1.0 / 3.0), 3, SolveConfig{});
  CHECK(tie.passed);
  CHECK(max_abs(tie.fw_path[1] - vec({1.0, 0.0, 0.0})) == 0.0);
}

TEST_CASE("proximal maps are firmly nonexpansive") {
  const int n = 3;
  const std::vector<ProxOracle> oracles = {
      ProxOracle::zero(n), ProxOracle::l1(n, 0.7),
      ProxOracle::box_indicator(Vector::Constant(n, -0.5), Vector::Constant(n, 1.0)),
      ProxOracle::half_square(vec({0.3, -0.2, 1.0}), 2.0)};
  Lcg64 rng(21);
  for (const auto& h : oracles) {
    CAPTURE(h.h_name);
    for (int i = 0; i < 100; ++i) {
      const Vector x = rng.uniform_vector(n, -3.0, 3.0), y = rng.uniform_vector(n, -3.0, 3.0);
      const double lambda = rng.uniform(0.1, 2.0);
      const Vector d = h(x, lambda) - h(y, lambda);
      CHECK(d.dot(x - y) >= d.squaredNorm() - 1e-12);
      // The prox point minimizes lambda h + 0.5 |. - x|^2, so it beats any other feasible point.
      const Vector p = h(x, lambda);
      const Vector q = h.domain ? h.domain->project(y) : y;
      CHECK(lambda * h.value(p) + 0.5 * (p - x).squaredNorm() <= lambda * h.value(q) + 0.5 * (q - x).squaredNorm() + 1e-12);
    }
  }
  CHECK_THROWS_AS(ProxOracle::l1(13), DimensionTooLarge);
}

TEST_CASE("soft thresholding") {
  const ProxOracle h = ProxOracle::l1(1);
  CHECK(h(scalar(2.0))[0] == 1.0);
  CHECK(h(scalar(-0.5))[0] == 0.0);
  CHECK(h(scalar(-3.0), 2.0)[0] == -1.0);
}

TEST_CASE("Bregman oracle invariants") {
  const std::vector<BregmanOracle> oracles = {BregmanOracle::euclidean(3, 2.0), BregmanOracle::entropic_box(3, 2.0),
                                              BregmanOracle::entropic_simplex(3)};
  Lcg64 rng(17);
  for (const auto& b : oracles) {
    CAPTURE(b.name);
    for (int i = 0; i < 100; ++i) {
      Vector x = rng.uniform_vector(3, 0.05, 1.9), y = rng.uniform_vector(3, 0.05, 1.9);
      if (b.domain && b.domain->kind() == DomainKind::simplex) {
        x /= x.sum();
        y /= y.sum();
      }
      CHECK(b.bregman(x, x) == doctest::Approx(0.0).scale(1.0));
      CHECK(b.bregman(x, y) >= 0.5 * b.strong_convexity * (x - y).squaredNorm() - 1e-12);
      const Vector back = b.conjugate_grad(b.phi.grad(x));
      CHECK(max_abs(back - x) < 1e-10);
    }
  }
}
