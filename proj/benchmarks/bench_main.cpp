#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "slfs/dataset.hpp"
#include "slfs/discretizer.hpp"
#include "slfs/engine.hpp"
#include "slfs/info_metrics.hpp"
#include "slfs/rng.hpp"

namespace {

using iv = std::vector<std::int32_t>;

iv random_column(std::mt19937_64& rng, std::size_t n, std::int32_t arity) {
  iv col(n);
  for (auto& v : col)
    v = static_cast<std::int32_t>(slfs::bounded_u64(rng, static_cast<std::uint64_t>(arity)));
  return col;
}

slfs::DiscreteDataset make_dataset(std::size_t n, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  slfs::DiscreteDataset ds;
  ds.n_classes = 2;
  ds.class_codes = random_column(rng, n, 2);
  for (std::size_t f = 0; f < p; ++f) {
    iv col = random_column(rng, n, 4);
    if (f % 2 == 0) {
      // Half the columns carry class signal so the tree search does real work.
      for (std::size_t i = 0; i < n; ++i)
        if (slfs::bounded_u64(rng, 100) < 60) col[i] = ds.class_codes[i] * 2 + col[i] % 2;
    }
    ds.features.push_back(std::move(col));
    ds.arities.push_back(4);
    ds.feature_names.push_back("f" + std::to_string(f));
  }
  return ds;
}

void BM_MutualInfo(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(42);
  const iv a = random_column(rng, n, 4);
  const iv b = random_column(rng, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(slfs::mutual_info(a, 4, b, 4));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MutualInfo)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_CondMutualInfo(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(43);
  const iv a = random_column(rng, n, 4);
  const iv b = random_column(rng, n, 4);
  const iv c = random_column(rng, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(slfs::cond_mutual_info(a, 4, b, 4, c, 2));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_CondMutualInfo)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_MdlpCuts(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(44);
  std::vector<double> values(n);
  iv labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<std::int32_t>(slfs::bounded_u64(rng, 2));
    values[i] = labels[i] * 2.0 + static_cast<double>(slfs::bounded_u64(rng, 1000)) / 250.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(slfs::mdlp_cuts(values, labels));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MdlpCuts)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_SelectSweep(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto ds = make_dataset(2000, p, 7);
  slfs::SlfsConfig cfg;
  cfg.max_depth = 2;
  cfg.epsilon = 0.0;
  for (auto _ : state) {
    const auto res = slfs::run_slfs(ds, cfg);
    benchmark::DoNotOptimize(res.selected.size());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(p));
}
BENCHMARK(BM_SelectSweep)->Arg(125)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
