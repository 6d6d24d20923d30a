#pragma once

#include <vector>

#include "dcforge/problems.hpp"
#include "dcforge/solvers.hpp"

namespace dcforge {

enum class LiftKind { basic, convex_constrained, dc_constrained };

const char* to_string(LiftKind kind);

/// Epigraph reformulation of a DC program as a concave objective over a convex set.
///
/// Lifted variable w = (x, t_0, ..., t_m) with phi(w) = t_0 - g_0(x), convex constraints
/// f_j(x) - t_j <= 0 for j = 0..m (the region), x in the base domain, and concave
/// constraints psi_i(w) = t_i - g_i(x) <= 0 for i = 1..m. Gradients are assembled from the
/// base oracles.
class EpigraphLift {
 public:
  const DCProblem& base() const { return base_; }
  LiftKind kind() const { return kind_; }
  int base_dim() const { return base_.dim(); }
  int lifted_dim() const { return region_.dim; }
  int num_constraints() const { return static_cast<int>(psis_.size()); }

  const SmoothFn& phi() const { return phi_; }
  const FeasibleRegion& region() const { return region_; }
  const std::vector<SmoothFn>& psis() const { return psis_; }

  /// (x, f_0(x), ..., f_m(x)).
  Vector embed(const Vector& x) const;
  Vector extract(const Vector& w) const { return w.head(base_dim()); }
  /// (t_0, ..., t_m).
  Vector t_components(const Vector& w) const { return w.tail(lifted_dim() - base_dim()); }

  /// Membership in the convex lifted domain (ignores psi).
  bool contains(const Vector& w, double tol = 1e-9) const { return region_.contains(w, tol); }
  /// Lifted domain and psi_i(w) <= tol.
  bool is_feasible(const Vector& w, double tol = 1e-9) const;

 private:
  friend EpigraphLift make_lift(const DCProblem& p, LiftKind kind);
  EpigraphLift(DCProblem base, LiftKind kind, SmoothFn phi, FeasibleRegion region, std::vector<SmoothFn> psis)
      : base_(std::move(base)), kind_(kind), phi_(std::move(phi)), region_(std::move(region)), psis_(std::move(psis)) {}

  DCProblem base_;
  LiftKind kind_;
  SmoothFn phi_;
  FeasibleRegion region_;
  std::vector<SmoothFn> psis_;
};

/// min t - g(x) s.t. f(x) <= t. Throws HasConstraints, UnsupportedDomain (non whole-space).
EpigraphLift lift_basic(const DCProblem& p);
/// As lift_basic with x restricted to the problem domain. Throws HasConstraints and
/// UnsupportedDomain for a whole-space domain.
EpigraphLift lift_convex_constrained(const DCProblem& p);
/// One t per objective and constraint. Throws NoConstraints when m = 0.
EpigraphLift lift_dc_constrained(const DCProblem& p);

EpigraphLift make_lift(const DCProblem& p, LiftKind kind);
/// The lift matching the problem's structure.
EpigraphLift make_lift(const DCProblem& p);

}  // namespace dcforge
