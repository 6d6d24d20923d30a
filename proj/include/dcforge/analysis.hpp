#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcforge/problems.hpp"
#include "dcforge/solvers.hpp"
#include "dcforge/transforms.hpp"

namespace dcforge {

/// f(x_k) - f(x_next) - <grad g(x_k), x_k - x_next>.
double dc_gap(const DCProblem& p, const Vector& x_k, const Vector& x_next);

/// max over the region (and linearized psi_i) of <grad phi(w), w - v>, by one inner solve.
/// Throws Unbounded when the maximum is +infinity.
double fw_gap(const SmoothFn& phi, const FeasibleRegion& region, const Vector& w, const SolveConfig& config,
              const std::vector<SmoothFn>& psis = {});
double fw_gap(const EpigraphLift& lift, const Vector& w, const SolveConfig& config);

struct GapRecord {
  int iteration = 0;
  std::optional<double> fw_gap;
  std::optional<double> dc_gap;
  std::optional<double> kkt_residual;
  double min_gap_so_far = 0.0;
  std::optional<double> bound_rhs;
};

/// Per-iteration gaps with the running minimum and (phi_1 - phi_star) / k when phi_star is known.
std::vector<GapRecord> gap_records(const IterateTrace& trace, std::optional<double> phi_star);

struct CurvatureEstimate {
  double sampled_lower_bound = 0.0;
  /// L * D^2 when the gradient Lipschitz constant is known.
  std::optional<double> analytic_upper_bound;
  int samples = 0;
};

/// Maximizes (2 / eta^2)(phi(w_bar) - phi(w) - <grad phi(w), w_bar - w>) over sampled pairs
/// (including extreme points of the domain) and eta in {1/n_etas, ..., 1}.
/// Throws UnboundedDomain when the diameter is infinite.
CurvatureEstimate estimate_curvature(const SmoothFn& phi, const Domain& domain, int n_pairs = 200, int n_etas = 20,
                                     std::uint64_t seed = 1);

enum class CertificateKind {
  lemma1_rate,
  corollary2_rate,
  theorem3_rate,
  corollary6_rate,
  appendix_convex_phi,
  appendix_convex_psi,
  equivalence,
  kkt,
  stationarity,
};

const char* to_string(CertificateKind kind);
/// Accepts the names produced by to_string. Throws std::invalid_argument.
CertificateKind parse_certificate_kind(const std::string& name);

/// passed <=> worst_margin >= -tolerance. Certificates that cannot be evaluated (no known
/// optimum, no curvature bound) report applicable = false and passed = true.
struct Certificate {
  CertificateKind kind = CertificateKind::stationarity;
  bool passed = false;
  double worst_margin = 0.0;
  std::string details;
  bool applicable = true;
};

/// Feasibility, then the minimum of <grad phi(w*), w - w*> over the
/// region intersected with the linearized constraints. Throws InfeasiblePoint.
Certificate check_stationarity(const SmoothFn& phi, const FeasibleRegion& region, const std::vector<SmoothFn>& psis,
                               const Vector& w_star, double tol, const SolveConfig& config = {});
Certificate check_stationarity(const EpigraphLift& lift, const Vector& w_star, double tol,
                               const SolveConfig& config = {});
/// Lifts the problem and checks embed(x_star).
Certificate check_stationarity(const DCProblem& p, const Vector& x_star, double tol, const SolveConfig& config = {});

struct RateContext {
  double tolerance = 1e-9;
  /// Curvature constant used by the convex-mode bounds (the analytic L * D^2).
  std::optional<double> curvature_bound;
  /// The optimum came from the grid oracle rather than a closed form.
  bool oracle_relative = false;
};

/// Rate kinds check min_{tau <= k} gap_tau <= (phi_1 - phi_star) / k for every recorded k;
/// appendix_convex_phi checks phi_k - phi_star <= 2C / (k + 1) and appendix_convex_psi checks
/// max_i psi_i(w_k) <= 2C / (k + 1). worst_margin = min over k of (bound - observed).
Certificate certify_rates(const IterateTrace& trace, const std::optional<KnownOptimum>& optimum,
                          CertificateKind kind, const RateContext& context = {});

/// Largest recorded KKT residual against tol; worst_margin = -residual.
Certificate certify_kkt(const IterateTrace& trace, double tol);

struct EquivalenceDeviation {
  double iterate = 0.0;
  double gap = 0.0;
  double kkt = 0.0;
  double slackness = 0.0;
  double feasibility = -std::numeric_limits<double>::infinity();
  int compared = 0;
};

/// Runs the direct CCCP (or CCCP+) driver and FW (or FW+) on the matching lift with unit steps
/// from the same start for K iterations and compares iterates, gaps, KKT residuals and
/// t_0 = f_0(x). worst_margin = -(largest deviation). Default tolerance 10 * eps_inner.
Certificate certify_equivalence(const DCProblem& p, const SolveConfig& config, int iterations,
                                std::optional<double> tolerance = std::nullopt,
                                EquivalenceDeviation* deviation = nullptr);

}  // namespace dcforge
