#pragma once

// Data-parallel sampling kernels. Each kernel has a serial reference implementation,
// kept for testing, and an OpenMP implementation used by the library. Both must return
// identical results for identical inputs.

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "dcforge/problems.hpp"

namespace dcforge::kernels {

struct GridScanResult {
  std::vector<Vector> local_minima;  // row-major grid order
  double best_value = std::numeric_limits<double>::infinity();
  Vector best_point;
  std::size_t feasible_points = 0;
};

GridScanResult grid_scan_serial(const DCProblem& problem, const GridBox& box, double step);
GridScanResult grid_scan_parallel(const DCProblem& problem, const GridBox& box, double step);

using PointPair = std::pair<Vector, Vector>;

/// max over pairs (w, w_hat) and etas of (2 / eta^2) (phi(w_bar) - phi(w) - <grad phi(w), w_bar - w>),
/// w_bar = (1 - eta) w + eta w_hat.
double curvature_sup_serial(const SmoothFn& phi, const std::vector<PointPair>& pairs, const std::vector<double>& etas);
double curvature_sup_parallel(const SmoothFn& phi, const std::vector<PointPair>& pairs, const std::vector<double>& etas);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();

}  // namespace dcforge::kernels
