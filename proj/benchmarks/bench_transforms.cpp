#include <benchmark/benchmark.h>

#include "epiconvex/transforms.hpp"

using namespace epiconvex;

namespace {

ExtGridFn quadratic(std::size_t res) {
  const GridSpec G({-1.0, -1.0}, {1.0, 1.0}, {res, res});
  return ExtGridFn::from_function(G, [](std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); });
}

void BM_Legendre1D(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(m), f(m), s(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(m - 1);
    f[i] = x[i] * x[i];
    s[i] = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(m - 1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(legendre_1d(x, f, s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Legendre1D)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_LegendreND(benchmark::State& state) {
  const auto res = static_cast<std::size_t>(state.range(0));
  const auto f = quadratic(res);
  for (auto _ : state) benchmark::DoNotOptimize(legendre_nd(f, {-1.0, -1.0}, {1.0, 1.0}, {res, res}));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_LegendreND)->Arg(33)->Arg(65)->Arg(129)->Arg(257)->Complexity(benchmark::oN);

}  // namespace
