#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dcforge/domain.hpp"
#include "dcforge/smooth_fn.hpp"

namespace dcforge {

/// One difference-of-convex constraint f(x) - g(x) <= 0.
struct DCConstraint {
  SmoothFn f;
  SmoothFn g;
};

/// min f(x) - g(x)  s.t.  x in domain,  f_i(x) - g_i(x) <= 0.
struct DCProblem {
  std::string name;
  SmoothFn f;
  SmoothFn g;
  Domain domain;
  std::vector<DCConstraint> constraints;
  Vector x_init;

  int dim() const { return f.dim(); }
  double objective(const Vector& x) const { return f.value(x) - g.value(x); }
  /// f_i(x) - g_i(x) for every DC constraint.
  Vector constraint_values(const Vector& x) const;
  bool is_feasible(const Vector& x, double tol = 1e-9) const;
  /// Throws DimensionMismatch or InfeasibleStart.
  void validate(double tol = 1e-9) const;
};

struct KnownOptimum {
  Vector x_star;
  double f_star;
};

enum class Provenance { analytic, grid_oracle };

struct BenchmarkInstance {
  std::string name;
  DCProblem problem;
  std::optional<KnownOptimum> known_optimum;
  std::vector<Vector> known_stationary_points;
  Provenance provenance = Provenance::analytic;
};

/// 64-bit linear congruential generator, x <- a x + c (mod 2^64), with Knuth's MMIX
/// constants a = 6364136223846793005, c = 1442695040888963407. Uniform doubles use the
/// top 53 bits, so seeded instances are reproducible across implementations.
class Lcg64 {
 public:
  using Engine = std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL, 1442695040888963407ULL, 0ULL>;

  explicit Lcg64(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Vector uniform_vector(int n, double lo, double hi);
  Matrix uniform_matrix(int rows, int cols, double lo, double hi);

 private:
  Engine engine_;
};

/// f(x) = 0.5 x'Ax + b'x, g(x) = 0.5 x'Cx + d'x. Attaches the analytic optimum when the
/// domain is whole_space and A - C is positive definite.
///
/// Throws NonSymmetricInput (asymmetry > 1e-12) and NotPSD (a sampled Rayleigh quotient
/// below -1e-10 over 50 seeded directions plus the coordinate axes).
BenchmarkInstance make_quadratic_dc(const Matrix& a, const Vector& b, const Matrix& c, const Vector& d,
                                    const Domain& domain, std::optional<Vector> x_init = std::nullopt);

/// f(x) = x^4, g(x) = x^2 on the real line; starts at x = 1.
BenchmarkInstance make_quartic_dc_1d();

/// Closed-form CCCP successor for the quartic instance: x -> cbrt(x / 2).
double quartic_cccp_map(double x);

enum class RingVariant { v1, v2 };

/// Desk-scale DC-constrained instance in R^2 with objective 0.5|x|^2 - <(1,1), x>.
///  v1: f1 = |x|^2, g1 = |x - (1,0)|^2  (affine difference 2 x1 - 1 <= 0), start (0,0).
///  v2: f1 = 0.5|x|^2 + 1, g1 = |x|^2   (feasible set |x|^2 >= 2), start (2,0).
BenchmarkInstance make_ring_constrained_dc_2d(RingVariant variant = RingVariant::v1);

/// Seeded unconstrained quadratic DC instance with A - C positive definite.
BenchmarkInstance make_seeded_quadratic_dc(std::uint64_t seed);
/// Seeded quadratic DC instance on a box (x in [-1, 1]^n) with A - C positive definite.
BenchmarkInstance make_seeded_box_quadratic_dc(std::uint64_t seed);
/// Seeded quadratic objective with 1-2 indefinite quadratic DC constraints; start 0 is
/// strictly feasible.
BenchmarkInstance make_seeded_dc_constrained(std::uint64_t seed);
/// f = g: every point is stationary.
BenchmarkInstance make_zero_dc(int dim = 2);

/// Resolves `quartic1d`, `quadratic_dc:<seed>`, `box_quadratic_dc:<seed>`,
/// `dc_constrained:<seed>`, `ring2d:v1`, `ring2d:v2`, `zero_dc`.
BenchmarkInstance make_instance(const std::string& name);
std::vector<std::string> zoo_names();

/// Sampled Rayleigh-quotient check; returns the smallest quotient seen.
double min_sampled_rayleigh(const Matrix& m, int samples = 50, std::uint64_t seed = 7);

struct GridBox {
  Vector lower;
  Vector upper;
};

/// All feasible grid points whose objective is <= that of every feasible grid point within
/// `window` steps per coordinate (window = 1 is the 8-neighbourhood in 2-D). Wider windows
/// discard staircase artifacts along curved constraint boundaries. Test oracle only; dim <= 2.
std::vector<Vector> grid_stationary_oracle(const DCProblem& problem, const GridBox& box, double step, int window = 1);

/// Smallest objective value over feasible grid points (oracle-relative optimum).
KnownOptimum grid_best_feasible(const DCProblem& problem, const GridBox& box, double step);

/// Greedy single-linkage grouping; returns the best-objective point of each cluster.
std::vector<Vector> cluster_points(const DCProblem& problem, const std::vector<Vector>& points, double radius);

}  // namespace dcforge
