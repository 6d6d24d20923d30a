#include <benchmark/benchmark.h>

#include <vector>

#include "dcforge/kernels.hpp"
#include "dcforge/problems.hpp"

using namespace dcforge;

namespace {

const GridBox kBox{Vector::Constant(2, -3.0), Vector::Constant(2, 3.0)};

void grid_scan(benchmark::State& state, bool parallel) {
  const auto inst = make_ring_constrained_dc_2d(RingVariant::v2);
  const double step = 6.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto r = parallel ? kernels::grid_scan_parallel(inst.problem, kBox, step)
                      : kernels::grid_scan_serial(inst.problem, kBox, step);
    benchmark::DoNotOptimize(r.best_value);
  }
  state.counters["threads"] = parallel ? kernels::max_threads() : 1;
}

void curvature(benchmark::State& state, bool parallel) {
  const int n = 20;
  Lcg64 rng(1);
  const Matrix m = rng.uniform_matrix(n, n, -1.0, 1.0);
  const SmoothFn phi = SmoothFn::quadratic(m.transpose() * m, rng.uniform_vector(n, -1.0, 1.0));
  std::vector<kernels::PointPair> pairs;
  for (int i = 0; i < state.range(0); ++i) pairs.emplace_back(rng.uniform_vector(n, -1.0, 1.0), rng.uniform_vector(n, -1.0, 1.0));
  std::vector<double> etas;
  for (int j = 1; j <= 20; ++j) etas.push_back(j / 20.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? kernels::curvature_sup_parallel(phi, pairs, etas)
                                      : kernels::curvature_sup_serial(phi, pairs, etas));
  }
  state.counters["threads"] = parallel ? kernels::max_threads() : 1;
}

}  // namespace

BENCHMARK_CAPTURE(grid_scan, serial, false)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(grid_scan, parallel, true)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(curvature, serial, false)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(curvature, parallel, true)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
