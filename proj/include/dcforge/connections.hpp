#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcforge/domain.hpp"
#include "dcforge/smooth_fn.hpp"
#include "dcforge/solvers.hpp"

namespace dcforge {

/// Closed-form proximal map of a convex h: prox(z, lambda) = argmin_x lambda h(x) + 0.5 |x - z|^2.
///
/// `pieces` describe h as a pointwise maximum of smooth convex functions on `domain`
/// (h = max_j pieces[j] for x in domain, +infinity outside), which lets the lifted
/// formulations express h through smooth constraints.
struct ProxOracle {
  std::string h_name;
  int dim = 1;
  std::function<Vector(const Vector&, double)> prox;
  std::vector<SmoothFn> pieces;
  std::optional<Domain> domain;

  Vector operator()(const Vector& z, double lambda = 1.0) const { return prox(z, lambda); }
  /// h(x); +infinity outside the domain.
  double value(const Vector& x) const;

  /// h = 0.
  static ProxOracle zero(int dim);
  /// h = weight * |x|_1 (soft thresholding).
  static ProxOracle l1(int dim, double weight = 1.0);
  /// h = indicator of the box (clamping).
  static ProxOracle box_indicator(Vector lower, Vector upper);
  /// h = (weight / 2) |x - center|^2.
  static ProxOracle half_square(Vector center, double weight = 1.0);
};

/// Strongly convex distance-generating function with its Bregman divergence and the
/// gradient of its Fenchel conjugate (restricted to `domain` when one is set).
struct BregmanOracle {
  std::string name;
  SmoothFn phi;
  /// Declared strong-convexity modulus in the Euclidean norm on the domain.
  double strong_convexity = 1.0;
  std::optional<Domain> domain;
  /// z -> argmax_{x in domain} <z, x> - phi(x).
  std::function<Vector(const Vector&)> conjugate_grad;

  int dim() const { return phi.dim(); }
  double bregman(const Vector& x, const Vector& y) const;

  /// phi = (L / 2) |x|^2 on R^dim.
  static BregmanOracle euclidean(int dim, double lipschitz = 1.0);
  /// phi = sum x_i log x_i on the unit simplex; conjugate gradient is the softmax.
  static BregmanOracle entropic_simplex(int dim);
  /// phi = sum x_i log x_i - x_i on the box [0, upper]^dim; conjugate gradient min(exp(z), upper).
  static BregmanOracle entropic_box(int dim, double upper);
};

/// Iterates produced through Frank-Wolfe on a lifted problem next to those of the direct
/// recursion, compared coordinatewise in the max norm.
struct PairedTrace {
  std::string name;
  std::vector<Vector> fw_path;
  std::vector<Vector> direct_path;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string details;
  /// Sampled curvature of the lifted objective over the box spanned by the FW iterates
  /// (mirror descent only).
  std::optional<double> sampled_curvature;
};

/// Bregman proximal point method through FW (unit steps) on
/// min t - phi(x) s.t. f(x) + phi(x) <= t, against x_{k+1} = argmin f(x) + D_phi(x, x_k).
PairedTrace ppm_via_fw(const SmoothFn& f, const BregmanOracle& breg, const Vector& x1, int iterations,
                       const SolveConfig& config);

/// Mirror descent through FW with steps eta_k on min t + f(x) - phi(x) s.t. phi(x) <= t,
/// against x_{k+1} = grad phi*(grad phi(x_k) - eta_k grad f(x_k)).
/// The two coincide for eta_k = 1 and for Euclidean phi.
PairedTrace mirror_descent_via_fw(const SmoothFn& f, const BregmanOracle& breg, const Vector& x1,
                                  const std::function<double(int)>& steps, int iterations, const SolveConfig& config);

/// Proximal gradient through FW (unit steps) on
/// min f(x) - (L/2)|x|^2 + t s.t. h_j(x) + (L/2)|x|^2 <= t for every piece h_j of g,
/// against x_{k+1} = prox_{g/L}(x_k - grad f(x_k) / L). L is f.lipschitz_grad().
PairedTrace prox_grad_via_fw(const SmoothFn& f, const ProxOracle& g, const Vector& x1, int iterations,
                             const SolveConfig& config);

/// Dual CCCP in one dimension: x*_k solves prox_g(x*_k) = prox_f(x_k), then
/// x_{k+1} = (1 - eta_k) x_k + eta_k x*_k. Each record carries the relation residual
/// |prox_g(x*_k) - prox_f(x_k)| in kkt_residual.
/// Throws NoSolution when the equation has no root in the expanded bracket.
IterateTrace dual_cccp_prox(const ProxOracle& f, const ProxOracle& g, double x1, const std::function<double(int)>& steps,
                            int iterations);

/// CCCP on min chi_X(x) - g(x) against FW (unit steps) on min -g over X.
PairedTrace fw_as_cccp(const SmoothFn& g, const Domain& domain, const Vector& x1, int iterations,
                       const SolveConfig& config);

}  // namespace dcforge
