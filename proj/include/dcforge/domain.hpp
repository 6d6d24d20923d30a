#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dcforge/smooth_fn.hpp"

namespace dcforge {

enum class DomainKind { whole_space, box, simplex, l2_ball, vertex_polytope };

const char* to_string(DomainKind kind);

/// Closed convex set with membership, Euclidean projection and a linear minimization oracle.
///
/// LMO ties are broken towards the lowest-index vertex (box vertices are indexed by the
/// bit pattern "coordinate i at its upper bound"), so repeated runs are reproducible.
/// `whole_space` has no LMO and infinite diameter.
class Domain {
 public:
  static Domain whole_space(int dim);
  /// Bounds may be infinite; such a box has no finite diameter.
  static Domain box(Vector lower, Vector upper);
  /// { x >= 0, sum(x) = radius }
  static Domain simplex(int dim, double radius = 1.0);
  static Domain l2_ball(Vector center, double radius);
  /// Convex hull of the columns of `vertices`.
  static Domain vertex_polytope(Matrix vertices);

  int dim() const { return dim_; }
  DomainKind kind() const { return kind_; }

  bool contains(const Vector& x, double tol = 1e-9) const;
  Vector project(const Vector& x) const;
  bool has_lmo() const { return kind_ != DomainKind::whole_space; }
  /// argmin_{s in D} <c, s>. Throws UnsupportedDomain on whole_space and Unbounded when
  /// the minimum is -infinity (box with an infinite bound in a descent direction).
  Vector lmo(const Vector& direction) const;
  double diameter() const;
  /// A point of the relative interior (used to start barrier methods).
  Vector interior_point() const;

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  const Matrix& vertices() const { return vertices_; }

  std::string describe() const;

 private:
  Domain(DomainKind kind, int dim) : kind_(kind), dim_(dim) {}

  DomainKind kind_;
  int dim_;
  Vector lower_, upper_;  // box
  Vector center_;         // l2_ball
  double radius_ = 0.0;   // simplex, l2_ball
  Matrix vertices_;       // vertex_polytope, one vertex per column
};

/// Euclidean projection onto { x >= 0, sum(x) = radius }.
Vector project_simplex(const Vector& x, double radius);

}  // namespace dcforge
