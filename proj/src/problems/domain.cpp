#include "dcforge/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dcforge/errors.hpp"

namespace dcforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Projection onto conv(columns of V) by accelerated projected gradient on the weights.
Vector project_polytope(const Matrix& vertices, const Vector& x) {
  const auto m = vertices.cols();
  if (m == 1) return vertices.col(0);
  const Matrix gram = vertices.transpose() * vertices;
  const double lip = std::max(Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(), 1e-300);
  const Vector vx = vertices.transpose() * x;

  // Warm start from the nearest vertex.
  Eigen::Index nearest = 0;
  (vertices.colwise() - x).colwise().squaredNorm().minCoeff(&nearest);
  Vector lam = Vector::Zero(m);
  lam[nearest] = 1.0;
  Vector y = lam;
  double t = 1.0;
  for (int it = 0; it < 20000; ++it) {
    const Vector grad = gram * y - vx;
    const Vector next = project_simplex(y - grad / lip, 1.0);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Vector diff = next - lam;
    // Restart momentum when it points uphill.
    if (grad.dot(diff) > 0.0) {
      y = lam;
      t = 1.0;
      continue;
    }
    y = next + ((t - 1.0) / t_next) * diff;
    lam = next;
    t = t_next;
    if (diff.lpNorm<Eigen::Infinity>() <= 1e-16) break;
  }
  return vertices * lam;
}

}  // namespace

const char* to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::whole_space:
      return "whole_space";
    case DomainKind::box:
      return "box";
    case DomainKind::simplex:
      return "simplex";
    case DomainKind::l2_ball:
      return "l2_ball";
    case DomainKind::vertex_polytope:
      return "vertex_polytope";
  }
  return "unknown";
}

Vector project_simplex(const Vector& x, double radius) {
  const auto n = x.size();
  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - radius) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) theta = candidate;
  }
  return (x.array() - theta).max(0.0).matrix();
}

Domain Domain::whole_space(int dim) {
  if (dim <= 0) throw std::invalid_argument("Domain: dimension must be positive");
  return Domain(DomainKind::whole_space, dim);
}

Domain Domain::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() == 0) throw DimensionMismatch("box: bound sizes differ");
  if ((lower.array() > upper.array()).any()) throw std::invalid_argument("box: lower > upper");
  Domain d(DomainKind::box, static_cast<int>(lower.size()));
  d.lower_ = std::move(lower);
  d.upper_ = std::move(upper);
  return d;
}

Domain Domain::simplex(int dim, double radius) {
  if (dim <= 0 || !(radius > 0.0)) throw std::invalid_argument("simplex: need dim > 0 and radius > 0");
  Domain d(DomainKind::simplex, dim);
  d.radius_ = radius;
  return d;
}

Domain Domain::l2_ball(Vector center, double radius) {
  if (center.size() == 0 || !(radius >= 0.0)) throw std::invalid_argument("l2_ball: bad arguments");
  Domain d(DomainKind::l2_ball, static_cast<int>(center.size()));
  d.center_ = std::move(center);
  d.radius_ = radius;
  return d;
}

Domain Domain::vertex_polytope(Matrix vertices) {
  if (vertices.rows() == 0 || vertices.cols() == 0) throw std::invalid_argument("vertex_polytope: no vertices");
  Domain d(DomainKind::vertex_polytope, static_cast<int>(vertices.rows()));
  d.vertices_ = std::move(vertices);
  return d;
}

bool Domain::contains(const Vector& x, double tol) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  switch (kind_) {
    case DomainKind::whole_space:
      return true;
    case DomainKind::box:
      return ((x - lower_).array() >= -tol).all() && ((upper_ - x).array() >= -tol).all();
    case DomainKind::simplex:
      return (x.array() >= -tol).all() && std::abs(x.sum() - radius_) <= tol * std::max(1.0, radius_) * dim_;
    case DomainKind::l2_ball:
      return (x - center_).norm() <= radius_ + tol;
    case DomainKind::vertex_polytope:
      return (project(x) - x).norm() <= std::max(tol, 1e-9);
  }
  return false;
}

Vector Domain::project(const Vector& x) const {
  if (x.size() != dim_) throw DimensionMismatch("project: dimension mismatch");
  switch (kind_) {
    case DomainKind::whole_space:
      return x;
    case DomainKind::box:
      return x.cwiseMax(lower_).cwiseMin(upper_);
    case DomainKind::simplex:
      return project_simplex(x, radius_);
    case DomainKind::l2_ball: {
      const Vector off = x - center_;
      const double r = off.norm();
      return r <= radius_ ? x : Vector(center_ + (radius_ / r) * off);
    }
    case DomainKind::vertex_polytope:
      return project_polytope(vertices_, x);
  }
  return x;
}

Vector Domain::lmo(const Vector& c) const {
  if (c.size() != dim_) throw DimensionMismatch("lmo: dimension mismatch");
  switch (kind_) {
    case DomainKind::whole_space:
      throw UnsupportedDomain("lmo: whole_space has no linear minimization oracle");
    case DomainKind::box: {
      Vector s(dim_);
      for (int i = 0; i < dim_; ++i) {
        s[i] = c[i] < 0.0 ? upper_[i] : lower_[i];
        if (!std::isfinite(s[i])) {
          if (c[i] == 0.0) {
            s[i] = std::isfinite(lower_[i]) ? lower_[i] : (std::isfinite(upper_[i]) ? upper_[i] : 0.0);
          } else {
            throw Unbounded("lmo: box unbounded along the requested direction");
          }
        }
      }
      return s;
    }
    case DomainKind::simplex: {
      Eigen::Index best = 0;
      c.minCoeff(&best);  // first minimal index
      Vector s = Vector::Zero(dim_);
      s[best] = radius_;
      return s;
    }
    case DomainKind::l2_ball: {
      const double n = c.norm();
      if (n == 0.0) return center_;
      return center_ - (radius_ / n) * c;
    }
    case DomainKind::vertex_polytope: {
      Eigen::Index best = 0;
      (vertices_.transpose() * c).minCoeff(&best);
      return vertices_.col(best);
    }
  }
  return c;
}

double Domain::diameter() const {
  switch (kind_) {
    case DomainKind::whole_space:
      return kInf;
    case DomainKind::box:
      return (upper_ - lower_).norm();
    case DomainKind::simplex:
      return dim_ >= 2 ? radius_ * std::sqrt(2.0) : 0.0;
    case DomainKind::l2_ball:
      return 2.0 * radius_;
    case DomainKind::vertex_polytope: {
      double best = 0.0;
      for (Eigen::Index i = 0; i < vertices_.cols(); ++i) {
        for (Eigen::Index j = i + 1; j < vertices_.cols(); ++j) {
          best = std::max(best, (vertices_.col(i) - vertices_.col(j)).norm());
        }
      }
      return best;
    }
  }
  return kInf;
}

Vector Domain::interior_point() const {
  switch (kind_) {
    case DomainKind::whole_space:
      return Vector::Zero(dim_);
    case DomainKind::box: {
      Vector p(dim_);
      for (int i = 0; i < dim_; ++i) {
        const bool lo = std::isfinite(lower_[i]);
        const bool hi = std::isfinite(upper_[i]);
        if (lo && hi) {
          p[i] = 0.5 * (lower_[i] + upper_[i]);
        } else if (lo) {
          p[i] = lower_[i] + 1.0;
        } else if (hi) {
          p[i] = upper_[i] - 1.0;
        } else {
          p[i] = 0.0;
        }
      }
      return p;
    }
    case DomainKind::simplex:
      return Vector::Constant(dim_, radius_ / dim_);
    case DomainKind::l2_ball:
      return center_;
    case DomainKind::vertex_polytope:
      return vertices_.rowwise().mean();
  }
  return Vector::Zero(dim_);
}

std::string Domain::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(dim=" << dim_;
  if (kind_ == DomainKind::simplex || kind_ == DomainKind::l2_ball) os << ", radius=" << radius_;
  if (kind_ == DomainKind::vertex_polytope) os << ", vertices=" << vertices_.cols();
  os << ")";
  return os.str();
}

}  // namespace dcforge
