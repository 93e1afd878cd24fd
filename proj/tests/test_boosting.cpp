#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rfrboost/boosting.hpp"
#include "rfrboost/serialize.hpp"

using namespace rfrboost;
using testing::random_matrix;

namespace {

// 1-D toy regression y = sin(4x) with optional noise.
Dataset sine_toy(int n, std::uint64_t seed, double noise_sd = 0.0) {
  Rng rng(seed);
  Dataset ds;
  ds.X.resize(n, 1);
  ds.Y.resize(n, 1);
  ds.columns.resize(1);
  for (int i = 0; i < n; ++i) {
    const double x = 2.0 * rng.uniform() - 1.0;
    ds.X(i, 0) = x;
    ds.Y(i, 0) = std::sin(4.0 * x) + noise_sd * rng.normal();
  }
  return ds;
}

Dataset blob_toy(int n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.task = TaskKind::Classification;
  ds.classes = 2;
  ds.X.resize(n, 2);
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const int c = i % 2;
    ds.X(i, 0) = (c == 0 ? -3.0 : 3.0) + rng.normal();
    ds.X(i, 1) = rng.normal();
    ds.labels(i) = c;
  }
  ds.columns.resize(2);
  return ds;
}

double training_rmse(const BoostedModel& model, const Dataset& data) {
  return evaluate_metric(model, data, MetricKind::Rmse);
}

}  // namespace

TEST_CASE("greedy with T = 0 equals the affine ridge baseline") {
  const Dataset ds = sine_toy(64, 1);
  TrainConfig cfg;
  cfg.layers = 0;
  cfg.lambda_w = 1e-3;
  const BoostedModel model = train_greedy_mse(ds, cfg);
  const LinearHead head =
      fit_affine_head(LossKind::Mse, ds.X, ds.targets(), 1e-3);
  CHECK((model.head.W - head.W).norm() < 1e-12);
  CHECK((model.head.b - head.b).norm() < 1e-12);
  CHECK(model.blocks.empty());
}

TEST_CASE("greedy training risk is non-increasing at eta 1, lambda 0") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset ds = sine_toy(256, 100 + seed, 0.05);
    TrainConfig cfg;
    cfg.layers = 10;
    cfg.eta = 1.0;
    cfg.lambda_w = 0.0;
    cfg.lambda_a = 0.0;
    cfg.structure = SandwichStructure::Scalar;
    cfg.features_per_block = 1;  // scalar requires p = D = 1
    cfg.seed = seed;
    const BoostedModel model = train_greedy_mse(ds, cfg);
    REQUIRE(model.risk_trace.size() == 11);
    for (std::size_t t = 1; t < model.risk_trace.size(); ++t) {
      CHECK(model.risk_trace[t] <=
            model.risk_trace[t - 1] + 1e-9 * (1.0 + model.risk_trace[0]));
    }
  }
}

TEST_CASE("greedy dense beats the linear baseline on the sine toy") {
  const Dataset ds = sine_toy(256, 3);
  TrainConfig cfg;
  cfg.layers = 5;
  cfg.features_per_block = 64;
  cfg.lambda_w = 1e-6;
  cfg.lambda_a = 1e-6;
  cfg.seed = 11;
  const BoostedModel model = train_greedy_mse(ds, cfg);

  TrainConfig base = cfg;
  base.layers = 0;
  const BoostedModel baseline = train_greedy_mse(ds, base);
  CHECK(training_rmse(model, ds) <= 0.75 * training_rmse(baseline, ds));
}

TEST_CASE("greedy rejects classification data") {
  const Dataset ds = blob_toy(32, 4);
  TrainConfig cfg;
  CHECK_THROWS_AS(train_greedy_mse(ds, cfg), InvalidInput);
}

TEST_CASE("gradient with T = 0 equals the top fit on the initial map") {
  const Dataset ds = blob_toy(64, 5);
  TrainConfig cfg;
  cfg.layers = 0;
  cfg.lambda_w = 1e-3;
  const BoostedModel model = train_gradient(ds, cfg, LossKind::Cce);
  const LinearHead head =
      fit_affine_head(LossKind::Cce, ds.X, ds.targets(), 1e-3);
  CHECK((model.head.W - head.W).norm() < 1e-12);
}

TEST_CASE("gradient stops early when the gradient vanishes") {
  // Perfectly fittable regression: residuals hit zero at round 0.
  Rng rng(6);
  Dataset ds;
  ds.X = random_matrix(rng, 32, 3);
  Matrix W = random_matrix(rng, 3, 1);
  ds.Y = ds.X * W;
  ds.columns.resize(3);
  TrainConfig cfg;
  cfg.layers = 4;
  cfg.lambda_w = 0.0;
  cfg.lambda_a = 1e-6;
  const BoostedModel model = train_gradient(ds, cfg, LossKind::Mse);
  CHECK(model.blocks.empty());
  CHECK(model.risk_trace.back() <= 1e-18);
}

TEST_CASE("gradient MSE training risk never exceeds the T = 0 baseline") {
  const Dataset ds = sine_toy(128, 7, 0.05);
  TrainConfig cfg;
  cfg.layers = 4;
  cfg.features_per_block = 32;
  cfg.seed = 2;
  const BoostedModel model = train_gradient(ds, cfg, LossKind::Mse);
  CHECK(model.risk_trace.back() <= model.risk_trace.front() + 1e-12);
}

TEST_CASE("gradient training risk is monotone along the recorded trace") {
  const Dataset ds = blob_toy(128, 8);
  TrainConfig cfg;
  cfg.layers = 3;
  cfg.features_per_block = 32;
  cfg.seed = 3;
  const BoostedModel model = train_gradient(ds, cfg, LossKind::Cce);
  for (std::size_t t = 1; t < model.risk_trace.size(); ++t) {
    CHECK(model.risk_trace[t] <= model.risk_trace[t - 1] + 1e-9);
  }
}

TEST_CASE("scalar and diagonal greedy run with p = D") {
  Rng rng(9);
  Dataset ds;
  ds.X = random_matrix(rng, 64, 3);
  ds.Y = (ds.X.array().square().rowwise().sum()).matrix();
  ds.columns.resize(3);
  for (const SandwichStructure structure :
       {SandwichStructure::Scalar, SandwichStructure::Diagonal}) {
    TrainConfig cfg;
    cfg.layers = 3;
    cfg.structure = structure;
    cfg.features_per_block = 3;
    cfg.seed = 4;
    const BoostedModel model = train_greedy_mse(ds, cfg);
    CHECK(model.blocks.size() == 3);
    CHECK(model.risk_trace.back() <= model.risk_trace.front() + 1e-12);
  }
}

TEST_CASE("config validation rejects p != D for scalar structure") {
  TrainConfig cfg;
  cfg.structure = SandwichStructure::Scalar;
  cfg.features_per_block = 8;  // D will be 1 for a 1-D toy
  const Dataset ds = sine_toy(32, 10);
  CHECK_THROWS_AS(train_greedy_mse(ds, cfg), InvalidInput);
}

TEST_CASE("0-block MSE model with identity map predicts the affine head") {
  const Dataset ds = sine_toy(32, 11);
  TrainConfig cfg;
  cfg.layers = 0;
  const BoostedModel model = train_greedy_mse(ds, cfg);
  const Matrix expect = (ds.X * model.head.W).rowwise() + model.head.b;
  CHECK((predict_raw(model, ds.X) - expect).norm() < 1e-12);
}

TEST_CASE("separable classification reaches training accuracy 1") {
  const Dataset ds = blob_toy(64, 12);
  TrainConfig cfg;
  cfg.layers = 2;
  cfg.features_per_block = 16;
  cfg.seed = 5;
  const BoostedModel model = train_gradient(ds, cfg, LossKind::Cce);
  CHECK(evaluate_metric(model, ds, MetricKind::Accuracy) == 1.0);
}

TEST_CASE("predict rejects mismatched feature counts") {
  const Dataset ds = sine_toy(32, 13);
  TrainConfig cfg;
  cfg.layers = 1;
  cfg.features_per_block = 8;
  const BoostedModel model = train_greedy_mse(ds, cfg);
  Rng rng(14);
  try {
    predict(model, random_matrix(rng, 4, 3));
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1") != std::string::npos);  // expected dim
    CHECK(msg.find("3") != std::string::npos);  // found dim
  }
}

TEST_CASE("training is deterministic given data, config, and seed") {
  const Dataset ds = sine_toy(128, 15, 0.05);
  TrainConfig cfg;
  cfg.layers = 3;
  cfg.features_per_block = 16;
  cfg.seed = 77;
  const BoostedModel a = train_greedy_mse(ds, cfg);
  const BoostedModel b = train_greedy_mse(ds, cfg);
  CHECK(serialize_model(a) == serialize_model(b));
}

TEST_CASE("rfnn with zero-scale iid features predicts the target mean") {
  const Dataset ds = sine_toy(64, 16);
  const BoostedModel model =
      train_rfnn(ds, 8, FeatureScheme::Iid, 0.0, 1e-9, LossKind::Mse, 1);
  const Matrix pred = predict(model, ds.X).values;
  for (int i = 0; i < 64; ++i) {
    CHECK(pred(i, 0) == doctest::Approx(ds.Y.mean()).epsilon(1e-9));
  }
}

TEST_CASE("rfnn separates easy blob data") {
  const Dataset ds = blob_toy(128, 17);
  const BoostedModel model =
      train_rfnn(ds, 64, FeatureScheme::Swim, 1.0, 1e-5, LossKind::Cce, 2);
  CHECK(evaluate_metric(model, ds, MetricKind::Accuracy) >= 0.99);
}

TEST_CASE("feature normalization stats are frozen into the blocks") {
  const Dataset ds = sine_toy(128, 18, 0.05);
  TrainConfig cfg;
  cfg.layers = 2;
  cfg.features_per_block = 16;
  cfg.feature_norm = true;
  cfg.seed = 6;
  const BoostedModel model = train_greedy_mse(ds, cfg);
  for (const auto& block : model.blocks) {
    REQUIRE(block.norm.has_value());
    CHECK(block.norm->mean.size() == 16);
  }
  // Same representation when recomputed from the stored stats.
  const Matrix on_train = predict_representation(model, ds.X);
  CHECK(on_train.allFinite());
}

TEST_CASE("bce and cce agree on a binary task") {
  const Dataset ds = blob_toy(128, 19);
  TrainConfig cfg;
  cfg.layers = 2;
  cfg.features_per_block = 16;
  cfg.seed = 7;
  const BoostedModel bce = train_gradient(ds, cfg, LossKind::Bce);
  const BoostedModel cce = train_gradient(ds, cfg, LossKind::Cce);
  CHECK(evaluate_metric(bce, ds, MetricKind::Accuracy) >= 0.99);
  CHECK(evaluate_metric(cce, ds, MetricKind::Accuracy) >= 0.99);
}
