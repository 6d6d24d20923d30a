#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dcforge/problems.hpp"
#include "dcforge/solvers.hpp"

namespace dcforge::cli {

/// One named pass/fail check of a battery. margin >= 0 means the check held with room to spare.
struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double margin = 0.0;
  std::string details;
};

/// FW+ problem with a closed-form optimum: min phi(w) s.t. w in region, psi_i(w) <= 0.
struct FwPlusInstance {
  std::string name;
  SmoothFn phi;
  FeasibleRegion region;
  std::vector<SmoothFn> psis;
  Vector w1;
  KnownOptimum optimum;
  /// L * D^2 of phi and of the psi_i over the region's domain.
  std::optional<double> phi_curvature_bound;
  std::optional<double> psi_curvature_bound;
};

/// phi = -0.5 |w - (0.3, 0.2)|^2 on [-1, 1]^2 with psi = 0.5 - |w - (-0.5, 0)|^2 (concave mode).
FwPlusInstance make_concave_exclusion_instance();
/// phi = 0.5 |w|^2, psi = |w|^2 - 1 on [-2, 2]^2 from w1 = (2, 2) (convex mode).
FwPlusInstance make_convex_box_instance();

std::vector<CheckResult> equivalence_unconstrained(int iterations = 50, double tol = 1e-8);
std::vector<CheckResult> equivalence_constrained(int iterations = 30, double tol = 1e-6, double feas_tol = 1e-6);
/// CCCP min dc-gap against (F_1 - F*) / k on quartic1d and quadratic_dc:1..10.
std::vector<CheckResult> cccp_rate_checks(int iterations = 1000);
/// FW+ concave mode on the ring lifts and the exclusion instance; also psi(w_k) <= feas_tol for k >= 2.
std::vector<CheckResult> fw_plus_concave_rate_checks(int iterations = 500, double feas_tol = 1e-6);
/// CCCP+ min dc-gap against (F_1 - F*) / k on the ring instances.
std::vector<CheckResult> cccp_plus_rate_checks(int iterations = 500);
/// Convex-mode FW+ bounds on the box instance.
std::vector<CheckResult> fw_plus_convex_rate_checks(int iterations = 1000);
/// grad f(x_{k+1}) = grad g(x_k) along CCCP and t_0 = f_0(x) along the lifted FW path.
std::vector<CheckResult> kkt_checks(int iterations = 50, double tol = 1e-8);
/// Sampled curvature <= tol for concave oracles and <= L D^2 + tol for 20 seeded smooth ones.
std::vector<CheckResult> curvature_checks(double tol = 1e-9);

/// 2-D quadratic DC instance f = 0.5 x'diag(4,3)x, g = |x|^2 - 2 x_1; minimizer (-1, 0).
BenchmarkInstance make_diag_quadratic_2d();
/// check_stationarity at the grid-oracle points of ring2d:v1, ring2d:v2 and the diagonal
/// quadratic (grid on [-3, 3]^2) must pass with tol; feasible points offset by +-perturb along
/// each axis must fail with margin <= -fail_margin.
std::vector<CheckResult> stationarity_checks(double step = 2e-3, int window = 50, double tol = 1e-4,
                                             double perturb = 1.0, double fail_margin = 0.1);

/// Every check of the five reduction demos.
std::vector<CheckResult> connections_checks();

enum class Suite { equivalence, rates, connections, all };

/// Throws std::invalid_argument for unknown names.
Suite parse_suite(const std::string& name);
std::vector<CheckResult> run_suite(Suite suite);

/// Prints an aligned pass/fail table; returns true when every check passed.
bool print_checks(const std::vector<CheckResult>& checks, std::ostream& out);

struct DemoReport {
  std::string name;
  std::vector<std::string> lines;
  std::vector<CheckResult> checks;
  bool passed() const;
};

std::vector<std::string> demo_names();
/// Throws std::invalid_argument for unknown names.
DemoReport run_demo(const std::string& name);

}  // namespace dcforge::cli
