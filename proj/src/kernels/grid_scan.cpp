#include <algorithm>
#include <cmath>
#include <limits>

#include "dcforge/errors.hpp"
#include "dcforge/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dcforge::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;

struct GridShape {
  int dim;
  long nx;
  long ny;  // 1 in 1-D
  double x0, y0, step;
};

GridShape make_shape(const DCProblem& problem, const GridBox& box, double step) {
  const int n = problem.dim();
  if (n > 2) throw DimensionTooLarge("grid oracle supports dim <= 2");
  if (box.lower.size() != n || box.upper.size() != n) throw DimensionMismatch("grid box dimension mismatch");
  if (!(step > 0.0) || !box.lower.allFinite() || !box.upper.allFinite()) {
    throw std::invalid_argument("grid oracle needs a finite box and positive step");
  }
  GridShape s{n, 0, 1, box.lower[0], n == 2 ? box.lower[1] : 0.0, step};
  s.nx = static_cast<long>(std::floor((box.upper[0] - box.lower[0]) / step + 1e-9)) + 1;
  if (n == 2) s.ny = static_cast<long>(std::floor((box.upper[1] - box.lower[1]) / step + 1e-9)) + 1;
  return s;
}

// Objective at a grid point, +inf when infeasible. `x` is a caller-owned scratch vector.
double evaluate(const DCProblem& p, Vector& x) {
  if (!p.domain.contains(x, kFeasTol)) return kInf;
  for (const auto& c : p.constraints) {
    if (c.f.value(x) - c.g.value(x) > kFeasTol) return kInf;
  }
  const double v = p.objective(x);
  return std::isfinite(v) ? v : kInf;
}

void fill_row(const DCProblem& p, const GridShape& s, long j, std::vector<double>& row, Vector& x) {
  if (s.dim == 2) x[1] = s.y0 + static_cast<double>(j) * s.step;
  for (long i = 0; i < s.nx; ++i) {
    x[0] = s.x0 + static_cast<double>(i) * s.step;
    row[static_cast<std::size_t>(i)] = evaluate(p, x);
  }
}

// Scans rows [row_begin, row_end) given neighbour access; appends to `out`.
void scan_rows(const DCProblem& p, const GridShape& s, long row_begin, long row_end, GridScanResult& out) {
  Vector x(s.dim);
  const auto width = static_cast<std::size_t>(s.nx);
  std::vector<double> prev(width, kInf), cur(width), next(width, kInf);
  if (row_begin > 0) fill_row(p, s, row_begin - 1, prev, x);
  fill_row(p, s, row_begin, cur, x);
  for (long j = row_begin; j < row_end; ++j) {
    if (j + 1 < s.ny) {
      fill_row(p, s, j + 1, next, x);
    } else {
      std::fill(next.begin(), next.end(), kInf);
    }
    for (long i = 0; i < s.nx; ++i) {
      const double v = cur[static_cast<std::size_t>(i)];
      if (!std::isfinite(v)) continue;
      ++out.feasible_points;
      bool minimal = true;
      for (long di = -1; di <= 1 && minimal; ++di) {
        const long ii = i + di;
        if (ii < 0 || ii >= s.nx) continue;
        const auto k = static_cast<std::size_t>(ii);
        if ((di != 0 && cur[k] < v) || prev[k] < v || next[k] < v) minimal = false;
      }
      if (!minimal && !(v < out.best_value)) continue;
      Vector point(s.dim);
      point[0] = s.x0 + static_cast<double>(i) * s.step;
      if (s.dim == 2) point[1] = s.y0 + static_cast<double>(j) * s.step;
      if (v < out.best_value) {
        out.best_value = v;
        out.best_point = point;
      }
      if (minimal) out.local_minima.push_back(std::move(point));
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }
}

void merge(GridScanResult& into, GridScanResult&& part) {
  into.feasible_points += part.feasible_points;
  if (part.best_value < into.best_value) {
    into.best_value = part.best_value;
    into.best_point = std::move(part.best_point);
  }
  into.local_minima.insert(into.local_minima.end(), std::make_move_iterator(part.local_minima.begin()),
                           std::make_move_iterator(part.local_minima.end()));
}

}  // namespace

GridScanResult grid_scan_serial(const DCProblem& problem, const GridBox& box, double step) {
  const GridShape s = make_shape(problem, box, step);
  GridScanResult out;
  scan_rows(problem, s, 0, s.ny, out);
  return out;
}

GridScanResult grid_scan_parallel(const DCProblem& problem, const GridBox& box, double step) {
  const GridShape s = make_shape(problem, box, step);
  const long chunks = std::max<long>(1, std::min<long>(s.ny, 4L * max_threads()));
  std::vector<GridScanResult> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic, 1)
  for (long c = 0; c < chunks; ++c) {
    const long begin = s.ny * c / chunks;
    const long end = s.ny * (c + 1) / chunks;
    if (begin < end) scan_rows(problem, s, begin, end, parts[static_cast<std::size_t>(c)]);
  }
  // Strict '<' in merge keeps the first best point in row order, as in the serial scan.
  GridScanResult out;
  for (auto& part : parts) merge(out, std::move(part));
  return out;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace dcforge::kernels
