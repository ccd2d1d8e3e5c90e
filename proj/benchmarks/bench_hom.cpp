#include <benchmark/benchmark.h>

#include "twinsim/hom.hpp"

namespace {

const twinsim::hom::SetupParams kLabSetup{0.42, 0.29, 0.9878, 0.68, 0.70};

void BM_Coincidences(benchmark::State& state) {
  const double p = 1e-3 * static_cast<double>(state.range(0));
  const auto src = twinsim::source::SourceParams::from_p(p);
  const auto trunc = twinsim::source::TruncationConfig::for_source(src, 1e-9);
  for (auto _ : state) {
    auto cc = twinsim::hom::coincidences(src, kLabSetup, trunc);
    benchmark::DoNotOptimize(cc);
  }
  state.counters["n_max"] = trunc.n_max;
}
BENCHMARK(BM_Coincidences)->Arg(10)->Arg(100)->Arg(1000)->Arg(2000)
    ->Unit(benchmark::kMillisecond);

void BM_ReferenceTable(benchmark::State& state) {
  const std::vector<double> grid = {0.001, 0.005, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
  twinsim::hom::CurveOptions options;
  options.fixed_n_max = 5;
  options.threads = 1;
  for (auto _ : state) {
    auto curve = twinsim::hom::visibility_curve(grid, kLabSetup, options);
    benchmark::DoNotOptimize(curve);
  }
}
BENCHMARK(BM_ReferenceTable)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
