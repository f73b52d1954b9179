#include <benchmark/benchmark.h>

#include <vector>

#include "seqlab/bcmix.hpp"
#include "seqlab/changepoint.hpp"
#include "seqlab/groupseq.hpp"
#include "seqlab/rng.hpp"

using namespace seqlab;

namespace {

std::vector<double> gaussian_data(std::size_t n) {
  Rng rng(1, 0, 0);
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.normal();
  return xs;
}

void bm_cusum_update(benchmark::State& state) {
  const auto xs = gaussian_data(4096);
  for (auto _ : state) {
    cpd::CusumState s;
    for (double x : xs) s = cpd::cusum_update(s, x - 0.5);
    benchmark::DoNotOptimize(s.w);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(bm_cusum_update);

void bm_window_cusum(benchmark::State& state) {
  const auto xs = gaussian_data(4096);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    cpd::WindowCusum w(m);
    for (double x : xs) w.push(x - 0.5);
    benchmark::DoNotOptimize(w.statistic());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(bm_window_cusum)->Arg(10)->Arg(100)->Arg(1000);

void bm_bcmix_forward(benchmark::State& state) {
  const auto xs = gaussian_data(2000);
  bcmix::HyperParams hp;
  hp.p = 0.01;
  const auto M = static_cast<std::size_t>(state.range(0));
  const bcmix::PruneOptions prune{M / 2, M};
  for (auto _ : state) {
    const auto fwd = bcmix::forward_filter(hp, xs, prune);
    benchmark::DoNotOptimize(fwd.back().log_mass);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(bm_bcmix_forward)->Arg(20)->Arg(100);

void bm_three_stage_paths(benchmark::State& state) {
  groupseq::Design d;
  d.m = 20;
  d.M = 120;
  for (auto _ : state) {
    const auto paths = groupseq::simulate_paths(d, d.u0, 1000, 7, 0, 1);
    benchmark::DoNotOptimize(paths.size());
  }
}
BENCHMARK(bm_three_stage_paths);

}  // namespace

BENCHMARK_MAIN();
