#include <benchmark/benchmark.h>

#include "embclf/embclf.hpp"

namespace {

using namespace embclf;

ProjectedDatabase random_db(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DatabaseEntry> es(n);
  for (std::size_t i = 0; i < n; ++i) {
    es[i] = {i, static_cast<std::uint8_t>(rng.below(2)), std::vector<double>(d)};
    for (auto& x : es[i].vector) x = rng.normal();
  }
  return ProjectedDatabase::build(std::move(es));
}

void BM_TopK(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto db = random_db(n, d, 1);
  Rng rng(2);
  std::vector<double> q(d);
  for (auto& x : q) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(db.top_k(q, 20));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_TopK)->Args({1000, 64})->Args({10000, 1024})->Unit(benchmark::kMicrosecond);

void BM_MineBatch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 1024;
  const auto db = random_db(n, d, 3);
  std::vector<std::uint64_t> ids(n);
  std::vector<double> flat;
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = db.id(i);
    const auto u = db.unit_vector(i);
    flat.insert(flat.end(), u.begin(), u.end());
  }
  for (auto _ : state) benchmark::DoNotOptimize(mine_contrastive_batch(db, ids, flat, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_MineBatch)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
