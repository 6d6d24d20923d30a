#include <algorithm>
#include <cmath>
#include <limits>

#include "dcforge/kernels.hpp"

namespace dcforge::kernels {

namespace {

double pair_sup(const SmoothFn& phi, const PointPair& pair, const std::vector<double>& etas) {
  const Vector& w = pair.first;
  const Vector& w_hat = pair.second;
  const double base = phi.value(w);
  const Vector g = phi.grad(w);
  const Vector dir = w_hat - w;
  const double slope = g.dot(dir);
  double best = -std::numeric_limits<double>::infinity();
  for (const double eta : etas) {
    const Vector bar = w + eta * dir;
    const double q = (2.0 / (eta * eta)) * (phi.value(bar) - base - eta * slope);
    if (std::isfinite(q)) best = std::max(best, q);
  }
  return best;
}

}  // namespace

double curvature_sup_serial(const SmoothFn& phi, const std::vector<PointPair>& pairs, const std::vector<double>& etas) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& pair : pairs) best = std::max(best, pair_sup(phi, pair, etas));
  return best;
}

double curvature_sup_parallel(const SmoothFn& phi, const std::vector<PointPair>& pairs,
                              const std::vector<double>& etas) {
  double best = -std::numeric_limits<double>::infinity();
  const auto n = static_cast<long>(pairs.size());
#pragma omp parallel for reduction(max : best) schedule(static)
  for (long i = 0; i < n; ++i) best = std::max(best, pair_sup(phi, pairs[static_cast<std::size_t>(i)], etas));
  return best;
}

}  // namespace dcforge::kernels
