#include "dcforge/smooth_fn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dcforge/errors.hpp"

namespace dcforge {

const char* to_string(Curvature c) {
  switch (c) {
    case Curvature::convex:
      return "convex";
    case Curvature::concave:
      return "concave";
    case Curvature::affine:
      return "affine";
    case Curvature::unknown:
      return "unknown";
  }
  return "unknown";
}

bool is_convex(Curvature c) { return c == Curvature::convex || c == Curvature::affine; }
bool is_concave(Curvature c) { return c == Curvature::concave || c == Curvature::affine; }

namespace {

Curvature negate(Curvature c) {
  switch (c) {
    case Curvature::convex:
      return Curvature::concave;
    case Curvature::concave:
      return Curvature::convex;
    default:
      return c;
  }
}

Curvature add(Curvature a, Curvature b) {
  if (a == Curvature::affine) return b;
  if (b == Curvature::affine) return a;
  if (a == b) return a;
  return Curvature::unknown;
}

Curvature classify_quadratic(const Matrix& h) {
  if (h.size() == 0 || h.cwiseAbs().maxCoeff() == 0.0) return Curvature::affine;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo >= -1e-12 * scale) return Curvature::convex;
  if (hi <= 1e-12 * scale) return Curvature::concave;
  return Curvature::unknown;
}

// 0.5 x'Hx + q'x + c, written out to avoid heap temporaries in hot loops.
double quadratic_value(const QuadraticForm& q, const Vector& x) {
  const Eigen::Index n = x.size();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) col += q.hessian(i, j) * x[i];
    acc += x[j] * (0.5 * col + q.linear[j]);
  }
  return acc + q.constant;
}

}  // namespace

SmoothFn::SmoothFn(int dim, ValueFn value, GradFn grad, Curvature curvature) : dim_(dim) {
  if (dim <= 0) throw std::invalid_argument("SmoothFn: dimension must be positive");
  Impl impl;
  impl.value = std::move(value);
  impl.grad = std::move(grad);
  impl.curvature = curvature;
  impl_ = std::make_shared<const Impl>(std::move(impl));
}

SmoothFn SmoothFn::quadratic(Matrix hessian, Vector linear, double constant) {
  const auto n = static_cast<int>(linear.size());
  if (hessian.rows() != n || hessian.cols() != n) {
    throw DimensionMismatch("SmoothFn::quadratic: Hessian and linear term disagree");
  }
  // Only the symmetric part matters.
  hessian = 0.5 * (hessian + hessian.transpose()).eval();
  QuadraticForm form{hessian, linear, constant};
  Impl impl;
  impl.value = [form](const Vector& x) { return quadratic_value(form, x); };
  impl.grad = [form](const Vector& x) -> Vector { return form.hessian * x + form.linear; };
  impl.hess = [h = form.hessian](const Vector&) -> Matrix { return h; };
  impl.curvature = classify_quadratic(hessian);
  impl.lipschitz = n > 0 && hessian.cwiseAbs().maxCoeff() > 0.0
                       ? Eigen::SelfAdjointEigenSolver<Matrix>(hessian, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .cwiseAbs()
                             .maxCoeff()
                       : 0.0;
  impl.quad = form;
  return SmoothFn(n, std::make_shared<const Impl>(std::move(impl)));
}

SmoothFn SmoothFn::affine(Vector linear, double constant) {
  const auto n = linear.size();
  return quadratic(Matrix::Zero(n, n), std::move(linear), constant);
}

SmoothFn SmoothFn::constant(int dim, double c) { return affine(Vector::Zero(dim), c); }

Matrix SmoothFn::hessian(const Vector& x) const {
  if (impl_->hess) return impl_->hess(x);
  Matrix h(dim_, dim_);
  Vector xp = x;
  for (int i = 0; i < dim_; ++i) {
    const double step = 1e-6 * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + step;
    const Vector gp = impl_->grad(xp);
    xp[i] = x[i] - step;
    const Vector gm = impl_->grad(xp);
    xp[i] = x[i];
    h.col(i) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

bool SmoothFn::is_affine() const {
  if (impl_->curvature == Curvature::affine) return true;
  return impl_->quad && impl_->quad->hessian.cwiseAbs().maxCoeff() == 0.0;
}

SmoothFn SmoothFn::with_hessian(HessFn hess) const {
  Impl impl = copy_impl();
  impl.hess = std::move(hess);
  return SmoothFn(dim_, std::make_shared<const Impl>(std::move(impl)));
}

SmoothFn SmoothFn::with_lipschitz(double lipschitz) const {
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("lipschitz constant must be >= 0");
  Impl impl = copy_impl();
  impl.lipschitz = lipschitz;
  return SmoothFn(dim_, std::make_shared<const Impl>(std::move(impl)));
}

SmoothFn SmoothFn::with_curvature(Curvature curvature) const {
  Impl impl = copy_impl();
  impl.curvature = curvature;
  return SmoothFn(dim_, std::make_shared<const Impl>(std::move(impl)));
}

SmoothFn SmoothFn::with_name(std::string name) const {
  Impl impl = copy_impl();
  impl.name = std::move(name);
  return SmoothFn(dim_, std::make_shared<const Impl>(std::move(impl)));
}

SmoothFn SmoothFn::plus_affine(const Vector& q, double c) const {
  if (q.size() != dim_) throw DimensionMismatch("plus_affine: dimension mismatch");
  Impl impl;
  const auto self = impl_;
  impl.value = [self, q, c](const Vector& x) { return self->value(x) + q.dot(x) + c; };
  impl.grad = [self, q](const Vector& x) -> Vector { return self->grad(x) + q; };
  if (self->hess) impl.hess = self->hess;
  impl.curvature = self->curvature;
  impl.lipschitz = self->lipschitz;
  if (self->quad) impl.quad = QuadraticForm{self->quad->hessian, self->quad->linear + q, self->quad->constant + c};
  impl.name = self->name;
  return SmoothFn(dim_, std::make_shared<const Impl>(std::move(impl)));
}

SmoothFn SmoothFn::scaled(double s) const {
  Impl impl;
  const auto self = impl_;
  impl.value = [self, s](const Vector& x) { return s * self->value(x); };
  impl.grad = [self, s](const Vector& x) -> Vector { return s * self->grad(x); };
  if (self->hess) impl.hess = [self, s](const Vector& x) -> Matrix { return s * self->hess(x); };
  if (s > 0.0) {
    impl.curvature = self->curvature;
  } else if (s < 0.0) {
    impl.curvature = negate(self->curvature);
  } else {
    impl.curvature = Curvature::affine;
  }
  if (self->lipschitz) impl.lipschitz = std::abs(s) * *self->lipschitz;
  if (self->quad) impl.quad = QuadraticForm{s * self->quad->hessian, s * self->quad->linear, s * self->quad->constant};
  return SmoothFn(dim_, std::make_shared<const Impl>(std::move(impl)));
}

SmoothFn SmoothFn::embedded(int total_dim, int offset) const {
  if (offset < 0 || offset + dim_ > total_dim) throw DimensionMismatch("embedded: block out of range");
  if (total_dim == dim_) return *this;
  Impl impl;
  const auto self = impl_;
  const int n = dim_;
  impl.value = [self, n, offset](const Vector& w) { return self->value(w.segment(offset, n)); };
  impl.grad = [self, n, offset, total_dim](const Vector& w) -> Vector {
    Vector g = Vector::Zero(total_dim);
    g.segment(offset, n) = self->grad(w.segment(offset, n));
    return g;
  };
  if (self->hess) {
    impl.hess = [self, n, offset, total_dim](const Vector& w) -> Matrix {
      Matrix h = Matrix::Zero(total_dim, total_dim);
      h.block(offset, offset, n, n) = self->hess(w.segment(offset, n));
      return h;
    };
  }
  impl.curvature = self->curvature;
  impl.lipschitz = self->lipschitz;
  if (self->quad) {
    QuadraticForm q{Matrix::Zero(total_dim, total_dim), Vector::Zero(total_dim), self->quad->constant};
    q.hessian.block(offset, offset, n, n) = self->quad->hessian;
    q.linear.segment(offset, n) = self->quad->linear;
    impl.quad = q;
  }
  impl.name = self->name;
  return SmoothFn(total_dim, std::make_shared<const Impl>(std::move(impl)));
}

SmoothFn operator+(const SmoothFn& a, const SmoothFn& b) {
  if (a.dim_ != b.dim_) throw DimensionMismatch("SmoothFn sum: dimension mismatch");
  SmoothFn::Impl impl;
  const auto pa = a.impl_;
  const auto pb = b.impl_;
  impl.value = [pa, pb](const Vector& x) { return pa->value(x) + pb->value(x); };
  impl.grad = [pa, pb](const Vector& x) -> Vector { return pa->grad(x) + pb->grad(x); };
  if (pa->hess && pb->hess) {
    impl.hess = [pa, pb](const Vector& x) -> Matrix { return pa->hess(x) + pb->hess(x); };
  }
  impl.curvature = add(pa->curvature, pb->curvature);
  if (pa->lipschitz && pb->lipschitz) impl.lipschitz = *pa->lipschitz + *pb->lipschitz;
  if (pa->quad && pb->quad) {
    impl.quad = QuadraticForm{pa->quad->hessian + pb->quad->hessian, pa->quad->linear + pb->quad->linear,
                              pa->quad->constant + pb->quad->constant};
  }
  return SmoothFn(a.dim_, std::make_shared<const SmoothFn::Impl>(std::move(impl)));
}

SmoothFn operator-(const SmoothFn& a, const SmoothFn& b) { return a + b.scaled(-1.0); }

double gradient_check(const SmoothFn& fn, const std::vector<Vector>& points) {
  double worst = 0.0;
  for (const Vector& x : points) {
    const Vector g = fn.grad(x);
    Vector xp = x;
    double err = 0.0;
    for (int i = 0; i < fn.dim(); ++i) {
      const double h = 1e-5 * (1.0 + std::abs(x[i]));
      xp[i] = x[i] + h;
      const double fp = fn.value(xp);
      xp[i] = x[i] - h;
      const double fm = fn.value(xp);
      xp[i] = x[i];
      err = std::max(err, std::abs((fp - fm) / (2.0 * h) - g[i]));
    }
    worst = std::max(worst, err / std::max(1.0, g.cwiseAbs().maxCoeff()));
  }
  return worst;
}

}  // namespace dcforge
