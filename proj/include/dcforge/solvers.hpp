#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcforge/domain.hpp"
#include "dcforge/problems.hpp"
#include "dcforge/smooth_fn.hpp"

namespace dcforge {

/// Half-space <normal, x> <= offset.
struct LinearConstraint {
  Vector normal;
  double offset = 0.0;

  double value(const Vector& x) const { return normal.dot(x) - offset; }
};

enum class StepKind { unit, harmonic, greedy, custom };

const char* to_string(StepKind kind);

/// FW step-size rule. Every produced step lies in [0, 1].
struct StepRule {
  StepKind kind = StepKind::unit;
  /// Only for StepKind::custom: k (1-based) -> eta_k.
  std::function<double(int)> schedule;

  static StepRule unit() { return {StepKind::unit, {}}; }
  static StepRule harmonic() { return {StepKind::harmonic, {}}; }
  static StepRule greedy() { return {StepKind::greedy, {}}; }
  static StepRule custom(std::function<double(int)> schedule) { return {StepKind::custom, std::move(schedule)}; }

  /// Step for iteration k along w -> w + eta (s - w). `phi` is only consulted for greedy.
  double step(int k, const SmoothFn& phi, const Vector& w, const Vector& s) const;
};

StepRule parse_step_rule(const std::string& name);

struct SolveConfig {
  int max_outer_iters = 100;
  /// Outer loop stops once the gap is <= gap_tol; 0 runs all max_outer_iters iterations.
  double gap_tol = 0.0;
  double eps_inner = 1e-10;
  int inner_max_iters = 10000;
  StepRule step_rule = StepRule::unit();
  double barrier_mu0 = 1.0;
  double barrier_shrink = 0.2;
  double unbounded_norm_threshold = 1e8;
  /// Record wall-clock time per iteration (non-deterministic; off by default).
  bool record_wall_time = false;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

enum class InnerStatus { converged, max_iters, unbounded };

const char* to_string(InnerStatus status);

struct InnerSolveReport {
  Vector x_star;
  int iterations = 0;
  double residual = 0.0;
  InnerStatus status = InnerStatus::converged;
  std::string method;
};

/// min objective(x) s.t. x[0:domain.dim()) in domain, linear constraints, c_j(x) <= 0.
/// The domain constrains the leading coordinates; trailing coordinates are free.
struct ConvexSubproblem {
  SmoothFn objective;
  Domain domain;
  std::vector<LinearConstraint> linear_constraints;
  std::vector<SmoothFn> convex_constraints;
};

/// Solves a convex subproblem to stationarity residual <= eps_inner.
///
/// Dispatch: closed form for PD quadratics and damped Newton otherwise (whole space);
/// the domain LMO for affine objectives and projected gradient otherwise (domain only);
/// log-barrier with an active-set Newton polish when constraints are present.
/// `start` fixes the initial point, so ties among minimizers are resolved by basin.
///
/// Throws InfeasibleSubproblem when the constraint set has no strictly feasible point and
/// UnsupportedDomain for vertex polytopes combined with constraints.
InnerSolveReport inner_convex_solve(const ConvexSubproblem& problem, const Vector& start, const SolveConfig& config);

InnerSolveReport inner_convex_solve(const SmoothFn& objective, const Domain& domain,
                                    const std::vector<LinearConstraint>& linear_constraints,
                                    const SolveConfig& config);

/// Domain on the leading coordinates intersected with linear and convex constraints.
struct FeasibleRegion {
  int dim = 0;
  Domain domain = Domain::whole_space(1);
  std::vector<LinearConstraint> linear_constraints;
  std::vector<SmoothFn> convex_constraints;

  static FeasibleRegion of(const Domain& domain);

  bool contains(const Vector& w, double tol = 1e-9) const;
  /// Largest constraint value (linear and convex); -inf without constraints.
  double max_violation(const Vector& w) const;
  bool is_geometric() const;
};

enum class TraceStatus { gap_tol, max_iters };

struct IterateRecord {
  int k = 0;
  Vector iterate;
  double objective = 0.0;
  std::optional<double> fw_gap;
  std::optional<double> dc_gap;
  double step = 1.0;
  int inner_iters = 0;
  std::optional<double> kkt_residual;
  Vector constraint_values;
  std::optional<double> feas_max;
  std::optional<double> wall_ms;
};

struct IterateTrace {
  std::string algorithm;
  std::vector<IterateRecord> records;
  Vector final_iterate;
  TraceStatus status = TraceStatus::max_iters;
  std::optional<double> best_gap;
  int best_gap_index = 0;

  /// fw_gap when recorded, otherwise dc_gap.
  std::optional<double> gap(std::size_t i) const;
};

/// Frank-Wolfe on min phi(w) over the region from w1.
IterateTrace fw_solve(const SmoothFn& phi, const FeasibleRegion& region, const Vector& w1, const SolveConfig& config);
IterateTrace fw_solve(const SmoothFn& phi, const Domain& domain, const Vector& w1, const SolveConfig& config);

enum class FwPlusMode { concave, convex };

/// Concave when phi and every psi are concave (affine counts as both), convex when all are
/// convex. Throws MixedCurvature otherwise.
FwPlusMode fw_plus_mode(const SmoothFn& phi, const std::vector<SmoothFn>& psis);

/// FW+ on min phi(w) s.t. w in region, psi_i(w) <= 0. Concave mode uses unit steps and
/// needs a feasible w1; convex mode uses eta_k = 2 / (k + 1) and only needs w1 in the region.
IterateTrace fw_plus_solve(const SmoothFn& phi, const FeasibleRegion& region, const std::vector<SmoothFn>& psis,
                           const Vector& w1, const SolveConfig& config);

/// CCCP: x_{k+1} = argmin_x f(x) - <grad g(x_k), x> over the problem domain.
IterateTrace cccp_solve(const DCProblem& problem, const SolveConfig& config);

/// CCCP+: additionally linearizes g_i in every DC constraint. Delegates to cccp_solve when
/// the problem has no DC constraints.
IterateTrace cccp_plus_solve(const DCProblem& problem, const SolveConfig& config);

}  // namespace dcforge
