#include <benchmark/benchmark.h>

#include "embclf/embclf.hpp"

namespace {

using namespace embclf;

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

void BM_ProjectBatch(benchmark::State& state) {
  const auto d = state.range(0);
  const auto params = HeadParams::random_init(static_cast<std::size_t>(d), 1024, 1024, 1);
  const auto h = random_matrix(d, 256, 2);
  for (auto _ : state) benchmark::DoNotOptimize(project_batch(params.proj, h));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_ProjectBatch)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Stage2Step(benchmark::State& state) {
  const auto d = state.range(0);
  auto params = HeadParams::random_init(static_cast<std::size_t>(d), 1024, 1024, 1);
  auto optim = OptimState::init(params);
  Stage2Batch batch;
  batch.h = random_matrix(d, 64, 2);
  batch.h_pos = random_matrix(d, 64, 3);
  batch.h_neg = random_matrix(d, 64, 4);
  batch.labels.assign(64, 0);
  for (std::size_t i = 0; i < 64; i += 2) batch.labels[i] = 1;
  for (auto _ : state) {
    auto r = stage2_grads(params, batch, {});
    optim_step(params, std::move(r.grads), optim, 0.1);
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_Stage2Step)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace
