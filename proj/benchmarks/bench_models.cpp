#include <benchmark/benchmark.h>

#include <burnout/dataset.hpp>
#include <burnout/forest.hpp>
#include <burnout/knn.hpp>
#include <burnout/svr.hpp>

using namespace burnout;

namespace {

data::Supervised standardized(std::size_t rows) {
  auto table = data::generate_synthetic(rows, 1);
  return data::apply_preprocess(table, data::fit_preprocess(table));
}

void BM_KernelRbf(benchmark::State& state) {
  const std::vector<double> a{0.1, -0.4, 1.2, 0.0, 1.0, -1.0}, b{0.3, 0.2, -0.8, 1.0, 0.0, -1.0};
  const models::KernelSpec k{models::KernelKind::Rbf, 0.17};
  for (auto _ : state) benchmark::DoNotOptimize(models::kernel_eval(k, a, b));
}
BENCHMARK(BM_KernelRbf);

void BM_TrainSvr(benchmark::State& state) {
  const auto s = standardized(static_cast<std::size_t>(state.range(0)));
  const models::KernelSpec k{models::KernelKind::Rbf, models::default_gamma(s.features)};
  for (auto _ : state) benchmark::DoNotOptimize(models::train_svr(s.features, s.targets, 1.0, 0.1, k));
}
BENCHMARK(BM_TrainSvr)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_PredictSvr(benchmark::State& state) {
  const auto s = standardized(2000);
  const auto m = models::train_svr(s.features, s.targets, 1.0, 0.1,
                                   {models::KernelKind::Rbf, models::default_gamma(s.features)});
  std::size_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(models::predict_svr(m, s.features.row(r++ % s.features.rows())));
}
BENCHMARK(BM_PredictSvr);

void BM_KnnPredict(benchmark::State& state) {
  const auto s = standardized(static_cast<std::size_t>(state.range(0)));
  const auto m = models::fit_knn(s.features, s.targets, 5);
  std::size_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(models::knn_predict(m, s.features.row(r++ % s.features.rows())));
}
BENCHMARK(BM_KnnPredict)->Arg(1000)->Arg(20000);

void BM_TrainForest(benchmark::State& state) {
  const auto s = standardized(static_cast<std::size_t>(state.range(0)));
  models::ForestParams p;
  p.n_trees = 20;
  for (auto _ : state) benchmark::DoNotOptimize(models::train_forest(s.features, s.targets, p));
}
BENCHMARK(BM_TrainForest)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
