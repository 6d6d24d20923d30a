#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace dcforge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Curvature class of a scalar function. `affine` counts as both convex and concave.
enum class Curvature { convex, concave, affine, unknown };

const char* to_string(Curvature c);
bool is_convex(Curvature c);
bool is_concave(Curvature c);

/// value(x) = 0.5 x'Hx + q'x + c
struct QuadraticForm {
  Matrix hessian;
  Vector linear;
  double constant = 0.0;
};

/// First-order (optionally second-order) oracle for one scalar function on R^dim.
///
/// Instances are immutable and cheap to copy; the callables are shared.
/// Outside its natural domain a function may report +infinity from value();
/// the solvers treat non-finite values as infeasible trial points.
class SmoothFn {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<Matrix(const Vector&)>;

  SmoothFn(int dim, ValueFn value, GradFn grad, Curvature curvature = Curvature::unknown);

  static SmoothFn quadratic(Matrix hessian, Vector linear, double constant = 0.0);
  static SmoothFn affine(Vector linear, double constant = 0.0);
  static SmoothFn constant(int dim, double c);

  int dim() const { return dim_; }
  double value(const Vector& x) const { return impl_->value(x); }
  Vector grad(const Vector& x) const { return impl_->grad(x); }
  /// Analytic Hessian when one was attached, otherwise central differences of grad().
  Matrix hessian(const Vector& x) const;
  bool has_analytic_hessian() const { return static_cast<bool>(impl_->hess); }

  Curvature curvature() const { return impl_->curvature; }
  std::optional<double> lipschitz_grad() const { return impl_->lipschitz; }
  const std::optional<QuadraticForm>& quadratic_form() const { return impl_->quad; }
  bool is_affine() const;
  const std::string& name() const { return impl_->name; }

  SmoothFn with_hessian(HessFn hess) const;
  SmoothFn with_lipschitz(double lipschitz) const;
  SmoothFn with_curvature(Curvature curvature) const;
  SmoothFn with_name(std::string name) const;

  /// x -> this(x) + <q, x> + c
  SmoothFn plus_affine(const Vector& q, double c = 0.0) const;
  /// x -> s * this(x)
  SmoothFn scaled(double s) const;
  /// Lifts to R^total_dim acting on the block [offset, offset + dim()).
  SmoothFn embedded(int total_dim, int offset = 0) const;

  friend SmoothFn operator+(const SmoothFn& a, const SmoothFn& b);
  friend SmoothFn operator-(const SmoothFn& a, const SmoothFn& b);
  friend SmoothFn operator-(const SmoothFn& a) { return a.scaled(-1.0); }

 private:
  struct Impl {
    ValueFn value;
    GradFn grad;
    HessFn hess;
    Curvature curvature = Curvature::unknown;
    std::optional<double> lipschitz;
    std::optional<QuadraticForm> quad;
    std::string name;
  };

  SmoothFn(int dim, std::shared_ptr<const Impl> impl) : dim_(dim), impl_(std::move(impl)) {}
  Impl copy_impl() const { return *impl_; }

  int dim_;
  std::shared_ptr<const Impl> impl_;
};

/// Largest relative error between grad() and central differences of value() over the
/// given points, step h_i = 1e-5 (1 + |x_i|). Relative to max(1, |grad|).
double gradient_check(const SmoothFn& fn, const std::vector<Vector>& points);

}  // namespace dcforge
