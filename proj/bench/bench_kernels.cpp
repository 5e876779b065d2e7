#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "bowenlab/cocycle.hpp"
#include "bowenlab/kernels.hpp"
#include "bowenlab/symbolic.hpp"

namespace {

using namespace bowenlab;

const Sft& avoid_graph() {
  static const Sft s = forbid_words(Sft::full_shift(6), {{0, 0, 0}}, 8);
  return s;
}

void BM_MatvecSerial(benchmark::State& state) {
  const auto& s = avoid_graph();
  std::vector<double> x(s.size(), 1.0), y(s.size());
  for (auto _ : state) {
    kernels::serial::weighted_matvec(s.graph(), x.data(), nullptr, x.data(), y.data(), 0.5);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.edge_count()));
}

void BM_MatvecOmp(benchmark::State& state) {
  const auto& s = avoid_graph();
  std::vector<double> x(s.size(), 1.0), y(s.size());
  for (auto _ : state) {
    kernels::omp::weighted_matvec(s.graph(), x.data(), nullptr, x.data(), y.data(), 0.5);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.edge_count()));
}

double term(std::size_t i) { return std::log1p(static_cast<double>(i)); }

void BM_BlockedSumSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::blocked_sum(1 << 22, 0.0, term));
}

void BM_BlockedSumOmp(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::blocked_sum(1 << 22, 0.0, term));
}

void BM_LyapunovMonteCarlo(benchmark::State& state) {
  kernels::set_thread_count(static_cast<int>(state.range(0)));
  const auto model = ModelSpec::perturbed_doubling(0.05);
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_lebesgue(model, 20, 0, 20000).exponents[0]);
  kernels::set_thread_count(0);
}

}  // namespace

BENCHMARK(BM_MatvecSerial);
BENCHMARK(BM_MatvecOmp);
BENCHMARK(BM_BlockedSumSerial);
BENCHMARK(BM_BlockedSumOmp);
BENCHMARK(BM_LyapunovMonteCarlo)->Arg(1)->Arg(0);

BENCHMARK_MAIN();
