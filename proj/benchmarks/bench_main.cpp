#include <benchmark/benchmark.h>

#include <numbers>

#include "gshape/contour.hpp"
#include "gshape/fdtd.hpp"
#include "gshape/levelset.hpp"
#include "gshape/material.hpp"

using namespace gshape;

namespace {

LevelSetField cylinder(const Grid2D& g) { return init_shape(Cylinder{{0.0, 0.0}, 1.0}, g); }

void BM_FdtdSteps(benchmark::State& state) {
  const Grid2D g = make_grid(7.0, 7.0, static_cast<int>(state.range(0)));
  const MaterialMap m = rasterize(cylinder(g), 12.0, 1.0);
  const SourceSpec src = SourceSpec::gaussian({-2.0, 0.0}, Axis::x, 0.5, 20.0);
  SolverSettings s;
  s.stop.fixed_steps = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(run(m, src, std::numbers::pi, s));
  state.SetItemsProcessed(state.iterations() * s.stop.fixed_steps);
}
BENCHMARK(BM_FdtdSteps)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Advect(benchmark::State& state) {
  const Grid2D g = make_grid(7.0, 7.0, static_cast<int>(state.range(0)));
  const LevelSetField phi = cylinder(g);
  const VelocityField v(g, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(advect(phi, v, 0.1, {state.range(1) != 0, 0.5}));
}
BENCHMARK(BM_Advect)->Args({10, 0})->Args({20, 0})->Args({20, 1})->Unit(benchmark::kMicrosecond);

void BM_Reinitialize(benchmark::State& state) {
  const Grid2D g = make_grid(7.0, 7.0, static_cast<int>(state.range(0)));
  const LevelSetField phi = advect(cylinder(g), VelocityField(g, 0.5), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(reinitialize(phi));
}
BENCHMARK(BM_Reinitialize)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_Curvature(benchmark::State& state) {
  const Grid2D g = make_grid(7.0, 7.0, 20);
  const LevelSetField phi = cylinder(g);
  for (auto _ : state) benchmark::DoNotOptimize(curvature(phi));
}
BENCHMARK(BM_Curvature)->Unit(benchmark::kMicrosecond);

void BM_ZeroContour(benchmark::State& state) {
  const Grid2D g = make_grid(7.0, 7.0, 20);
  const LevelSetField phi = cylinder(g);
  for (auto _ : state) benchmark::DoNotOptimize(zero_contour(phi));
}
BENCHMARK(BM_ZeroContour)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
