#include <benchmark/benchmark.h>

#include "epiconvex/hopflax.hpp"

using namespace epiconvex;

namespace {

double sq(std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); }

ExtGridFn sampled(double L, std::size_t res) {
  return ExtGridFn::from_function(GridSpec({-L, -L}, {L, L}, {res, res}), sq);
}

ExtGridFn parabola(std::size_t res) {
  return ExtGridFn::from_function(GridSpec({-1.0}, {1.0}, {res}), [](std::span<const double> x) { return x[0] * x[0]; });
}

// 1-D convex g takes the divide-and-conquer path; the reference is the double loop.
void BM_InfConv1D(benchmark::State& state) {
  const auto f = parabola(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(infconv(f, f));
}
BENCHMARK(BM_InfConv1D)->RangeMultiplier(4)->Range(256, 16384);

void BM_InfConv1DReference(benchmark::State& state) {
  const auto f = parabola(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(infconv_reference(f, f));
}
BENCHMARK(BM_InfConv1DReference)->RangeMultiplier(4)->Range(256, 4096);

void BM_InfConv2D(benchmark::State& state) {
  const auto res = static_cast<std::size_t>(state.range(0));
  const auto f = sampled(1.0, res), g = sampled(1.0, res);
  for (auto _ : state) benchmark::DoNotOptimize(infconv(f, g));
}
BENCHMARK(BM_InfConv2D)->Arg(17)->Arg(33);

void BM_HopfLaxPoint(benchmark::State& state) {
  const auto method = state.range(0) == 0 ? HopfLaxMethod::reference : HopfLaxMethod::branch_and_bound;
  const auto g = sampled(2.0, 81), W = sampled(2.0, 81);
  const auto ev = make_grid_evaluator(g);
  const auto Y = YSet::from_grid(W);
  const double x[2] = {0.3, -0.7};
  for (auto _ : state) benchmark::DoNotOptimize(hopflax_point(*ev, Y, 0.5, x, method));
}
BENCHMARK(BM_HopfLaxPoint)->Arg(0)->Arg(1);

void BM_HopfLaxApply(benchmark::State& state) {
  const auto res = static_cast<std::size_t>(state.range(0));
  const auto g = sampled(2.0, res), W = sampled(2.0, res);
  for (auto _ : state) benchmark::DoNotOptimize(hopflax_apply(g, W, 0.5));
}
BENCHMARK(BM_HopfLaxApply)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

}  // namespace
