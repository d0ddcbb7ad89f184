#include <benchmark/benchmark.h>

#include <vector>

#include "degroot/engine.hpp"
#include "degroot/fragmentation.hpp"
#include "degroot/generators.hpp"

using namespace degroot;

static void BM_DirichletRow(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> alpha(n, 0.5), out(n);
  Rng rng(1);
  for (auto _ : state) {
    sample_dirichlet(rng, alpha, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DirichletRow)->Arg(4)->Arg(32)->Arg(256);

static void BM_AccumulateRing(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = ring_uniform_self(n);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    Generator gen(spec, seed++);
    benchmark::DoNotOptimize(accumulate(gen, 200).consensus_gap);
  }
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_AccumulateRing)->Arg(8)->Arg(32)->Arg(128);

static void BM_AccumulateDense(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = dirichlet_rows(n, std::vector<double>(n * n, 1.0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    Generator gen(spec, seed++);
    benchmark::DoNotOptimize(accumulate(gen, 50).consensus_gap);
  }
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_AccumulateDense)->Arg(8)->Arg(32)->Arg(64);

static void BM_LogEnergy(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(log_energy(ProductBeta{0.7, 1.3, 2.5, 0.9}));
}
BENCHMARK(BM_LogEnergy)->Unit(benchmark::kMillisecond);

static void BM_PMaxIslands(benchmark::State& state) {
  const auto dist = islands_distribution(static_cast<std::size_t>(state.range(0)), 0.6, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(p_max(dist).p_max);
}
BENCHMARK(BM_PMaxIslands)->Arg(2)->Arg(3)->Arg(4);
BENCHMARK_MAIN();
