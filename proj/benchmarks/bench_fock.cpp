#include <benchmark/benchmark.h>

#include "twinsim/fock.hpp"

namespace {

void BM_BsOutputAmplitudes(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto table = twinsim::fock::bs_output_amplitudes({n, n}, 0.5);
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_BsOutputAmplitudes)->Arg(4)->Arg(10)->Arg(20);

void BM_LossPmf(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto pmf = twinsim::fock::loss_pmf(n, 0.42);
    benchmark::DoNotOptimize(pmf);
  }
}
BENCHMARK(BM_LossPmf)->Arg(8)->Arg(64);

}  // namespace
