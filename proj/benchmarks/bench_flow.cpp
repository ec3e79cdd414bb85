#include "extlab/comparison.hpp"
#include "extlab/csf.hpp"
#include "extlab/ramp.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace extlab;

void BM_CurveGeometryFlat(benchmark::State& state) {
  const MetricBackground bg = MetricBackground::flat_torus3();
  const DiscreteCurve c = flat_circle(bg, 1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(curve_geometry(c, bg, 0.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CurveGeometryFlat)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_CurveGeometrySphere(benchmark::State& state) {
  const MetricBackground bg = MetricBackground::round_sphere3_shrinking();
  const DiscreteCurve c = latitude_circle(bg, 1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(curve_geometry(c, bg, 0.1));
}
BENCHMARK(BM_CurveGeometrySphere)->Arg(128)->Arg(512);

void BM_CsfStep(benchmark::State& state) {
  const MetricBackground bg = MetricBackground::flat_torus3();
  const int n = static_cast<int>(state.range(0));
  const DiscreteCurve c = flat_circle(bg, 1.0, n);
  FlowConfig cfg;
  cfg.redistribute = state.range(1) != 0;
  const double dt = 0.1 * curve_geometry(c, bg, 0.0).h_min * curve_geometry(c, bg, 0.0).h_min;
  for (auto _ : state) benchmark::DoNotOptimize(csf_step(c, bg, 0.0, dt, cfg));
}
BENCHMARK(BM_CsfStep)->Args({128, 0})->Args({128, 1})->Args({512, 1});

void BM_RampStep(benchmark::State& state) {
  const MetricBackground bg = MetricBackground::round_sphere3_shrinking();
  const MetricBackground product = product_with_circle(bg, 0.1);
  const DiscreteCurve c = assemble(lift(latitude_circle(bg, 1.0, 128), 0.1), product);
  const FlowConfig cfg;
  const double h = curve_geometry(c, product, 0.0).h_min;
  for (auto _ : state) benchmark::DoNotOptimize(csf_step(c, product, 0.0, 0.1 * h * h, cfg));
}
BENCHMARK(BM_RampStep);

void BM_ComparisonOde(benchmark::State& state) {
  const MetricBackground bg = MetricBackground::round_sphere3_shrinking();
  for (auto _ : state) benchmark::DoNotOptimize(comparison_ode(2.0 * kPi, bg, 0.0, 0.2, 1e-4));
}
BENCHMARK(BM_ComparisonOde);

}  // namespace

BENCHMARK_MAIN();
