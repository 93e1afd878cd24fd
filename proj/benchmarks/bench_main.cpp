#include <benchmark/benchmark.h>

#include <cmath>

#include "rfrboost/boosting.hpp"
#include "rfrboost/random_features.hpp"
#include "rfrboost/rng.hpp"
#include "rfrboost/sandwich.hpp"

using namespace rfrboost;

namespace {

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

Dataset sine_data(int n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.X = gaussian(rng, n, 4);
  ds.Y.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    ds.Y(i, 0) = std::sin(ds.X(i, 0)) + 0.5 * ds.X(i, 1) * ds.X(i, 2);
  }
  ds.columns.resize(4);
  return ds;
}

}  // namespace

static void BM_SandwichDense(benchmark::State& state) {
  const int n = 1024;
  const int D = static_cast<int>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  Rng rng(1);
  SandwichProblem prob;
  prob.residuals = gaussian(rng, n, 8);
  prob.top = gaussian(rng, D, 8);
  prob.features = gaussian(rng, n, p);
  prob.lambda = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sandwich_dense(prob));
  }
}
BENCHMARK(BM_SandwichDense)->Args({16, 128})->Args({64, 512})->Args({128, 1024});

static void BM_SandwichDiag(benchmark::State& state) {
  const int n = 1024;
  const int D = static_cast<int>(state.range(0));
  Rng rng(2);
  SandwichProblem prob;
  prob.residuals = gaussian(rng, n, 8);
  prob.top = gaussian(rng, D, 8);
  prob.features = gaussian(rng, n, D);
  prob.lambda = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sandwich_diag(prob));
  }
}
BENCHMARK(BM_SandwichDiag)->Arg(64)->Arg(256)->Arg(1024);

static void BM_SwimSampling(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng data_rng(3);
  const Matrix inputs = gaussian(data_rng, n, 8);
  const Matrix targets = gaussian(data_rng, n, 1);
  const SwimConfig cfg = swim_from_scale(1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(sample_swim_layer(inputs, targets, 512, cfg, rng));
  }
}
BENCHMARK(BM_SwimSampling)->Arg(1000)->Arg(10000);

static void BM_GradientBoostRound(benchmark::State& state) {
  const Dataset ds = sine_data(static_cast<int>(state.range(0)), 4);
  TrainConfig cfg;
  cfg.layers = 1;
  cfg.features_per_block = 256;
  cfg.feature_norm = true;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(train_gradient(ds, cfg, LossKind::Mse));
  }
}
BENCHMARK(BM_GradientBoostRound)->Arg(1000)->Arg(5000);

static void BM_GreedyBoostRound(benchmark::State& state) {
  const Dataset ds = sine_data(static_cast<int>(state.range(0)), 5);
  TrainConfig cfg;
  cfg.layers = 1;
  cfg.features_per_block = 256;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(train_greedy_mse(ds, cfg));
  }
}
BENCHMARK(BM_GreedyBoostRound)->Arg(1000)->Arg(5000);

BENCHMARK_MAIN();
