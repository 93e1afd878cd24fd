#include <doctest.h>

#include "oracles.hpp"
#include "rfrboost/grid.hpp"

using namespace rfrboost;
using testing::random_matrix;

namespace {

Dataset grid_toy(int n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.X = random_matrix(rng, n, 2);
  ds.Y = (ds.X.col(0).array().sin() + 0.5 * ds.X.col(1).array()).matrix();
  ds.columns.resize(2);
  return ds;
}

ModelRecipe small_recipe() {
  ModelRecipe recipe;
  recipe.algo = Algorithm::Gradient;
  recipe.loss = LossKind::Mse;
  recipe.cfg.layers = 1;
  recipe.cfg.features_per_block = 8;
  recipe.cfg.lambda_w = 1e-4;
  recipe.cfg.lambda_a = 1e-4;
  return recipe;
}

}  // namespace

TEST_CASE("grid size is the product of axis lengths") {
  GridSpec grid;
  grid.axes = {{"layers", {1, 2, 3}}, {"lambda_w", {1e-4, 1e-2}}};
  CHECK(grid.size() == 6);
  GridSpec empty_axis;
  empty_axis.axes = {{"layers", {}}};
  CHECK_THROWS_AS(empty_axis.size(), InvalidInput);
}

TEST_CASE("table is exhaustive with the first axis slowest") {
  const Dataset ds = grid_toy(60, 61);
  GridSpec grid;
  grid.axes = {{"layers", {1, 2}}, {"lambda_w", {1e-4, 1e-2, 1.0}}};
  const GridResult res =
      grid_search(ds, grid, small_recipe(), 3, MetricKind::Rmse, 5);
  REQUIRE(res.table.size() == 6);
  // Enumeration order: layers varies slowest.
  CHECK(res.table[0].point.at("layers") == 1);
  CHECK(res.table[2].point.at("layers") == 1);
  CHECK(res.table[3].point.at("layers") == 2);
  CHECK(res.table[0].point.at("lambda_w") == 1e-4);
  CHECK(res.table[1].point.at("lambda_w") == 1e-2);
  CHECK(res.table[2].point.at("lambda_w") == 1.0);
}

TEST_CASE("single-point grid returns that point") {
  const Dataset ds = grid_toy(40, 62);
  GridSpec grid;
  grid.axes = {{"layers", {2}}};
  const GridResult res =
      grid_search(ds, grid, small_recipe(), 2, MetricKind::Rmse, 6);
  REQUIRE(res.table.size() == 1);
  CHECK(res.best_index == 0);
  CHECK(res.best_recipe.cfg.layers == 2);
}

TEST_CASE("a clearly dominating configuration is selected") {
  const Dataset ds = grid_toy(120, 63);
  GridSpec grid;
  // RFNN is a pure ridge fit, so lambda_w = 1e12 collapses it to the
  // intercept; any sane value dominates.
  grid.axes = {{"lambda_w", {1e-4, 1e12}}};
  ModelRecipe recipe;
  recipe.algo = Algorithm::Rfnn;
  recipe.loss = LossKind::Mse;
  recipe.cfg.features_per_block = 32;
  const GridResult res =
      grid_search(ds, grid, recipe, 3, MetricKind::Rmse, 7);
  CHECK(res.best_index == 0);
  CHECK(res.best_recipe.cfg.lambda_w == 1e-4);
  CHECK(res.table[0].cv.mean < res.table[1].cv.mean);
}

TEST_CASE("exact ties break toward fewer layers then larger lambda_w") {
  // Trivially separable blobs: every configuration saturates at accuracy 1,
  // an exact tie, so selection falls through to the deterministic tie-break.
  Rng rng(64);
  Dataset ds;
  ds.task = TaskKind::Classification;
  ds.classes = 2;
  ds.X.resize(90, 2);
  ds.labels.resize(90);
  for (int i = 0; i < 90; ++i) {
    const int c = i % 2;
    ds.X(i, 0) = (c == 0 ? -5.0 : 5.0) + 0.1 * rng.normal();
    ds.X(i, 1) = rng.normal();
    ds.labels(i) = c;
  }
  ds.columns.resize(2);
  GridSpec grid;
  grid.axes = {{"layers", {3, 1}}, {"lambda_w", {1e-6, 1e-2}}};
  ModelRecipe recipe = small_recipe();
  recipe.loss = LossKind::Cce;
  recipe.cfg.features_per_block = 16;
  const GridResult res =
      grid_search(ds, grid, recipe, 3, MetricKind::Accuracy, 8);
  bool all_perfect = true;
  for (const auto& row : res.table) all_perfect &= row.cv.mean == 1.0;
  REQUIRE(all_perfect);
  CHECK(res.best_recipe.cfg.layers == 1);
  CHECK(res.best_recipe.cfg.lambda_w == 1e-2);
}

TEST_CASE("same seed gives an identical table, serial or parallel") {
  const Dataset ds = grid_toy(60, 65);
  GridSpec grid;
  grid.axes = {{"layers", {1, 2}}, {"lambda_a", {1e-4, 1e-2}}};
  const GridResult a =
      grid_search(ds, grid, small_recipe(), 3, MetricKind::Rmse, 9, false);
  const GridResult b =
      grid_search(ds, grid, small_recipe(), 3, MetricKind::Rmse, 9, false);
  const GridResult c =
      grid_search(ds, grid, small_recipe(), 3, MetricKind::Rmse, 9, true);
  REQUIRE(a.table.size() == b.table.size());
  REQUIRE(a.table.size() == c.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    CHECK(a.table[i].cv.fold_scores == b.table[i].cv.fold_scores);
    CHECK(a.table[i].cv.fold_scores == c.table[i].cv.fold_scores);
  }
  CHECK(a.best_index == b.best_index);
  CHECK(a.best_index == c.best_index);
}

TEST_CASE("unknown axis names are rejected") {
  ModelRecipe recipe = small_recipe();
  CHECK_THROWS_AS(apply_axis(recipe, "momentum", 0.9), ConfigError);
  const Dataset ds = grid_toy(30, 66);
  GridSpec grid;
  grid.axes = {{"momentum", {0.9}}};
  CHECK_THROWS_AS(grid_search(ds, grid, recipe, 2, MetricKind::Rmse, 10),
                  ConfigError);
}

TEST_CASE("apply_axis maps onto TrainConfig fields") {
  ModelRecipe recipe = small_recipe();
  apply_axis(recipe, "layers", 4.0);
  apply_axis(recipe, "eta", 0.5);
  apply_axis(recipe, "lambda_w", 1e-3);
  apply_axis(recipe, "lambda_a", 1e-5);
  apply_axis(recipe, "features_per_block", 32.0);
  apply_axis(recipe, "feature_scale", 2.0);
  apply_axis(recipe, "hidden_dim", 16.0);
  CHECK(recipe.cfg.layers == 4);
  CHECK(recipe.cfg.eta == 0.5);
  CHECK(recipe.cfg.lambda_w == 1e-3);
  CHECK(recipe.cfg.lambda_a == 1e-5);
  CHECK(recipe.cfg.features_per_block == 32);
  CHECK(recipe.cfg.feature_scale == 2.0);
  CHECK(recipe.cfg.hidden_dim == 16);
}

TEST_CASE("inner fold count below 2 is rejected") {
  const Dataset ds = grid_toy(30, 67);
  GridSpec grid;
  grid.axes = {{"layers", {1}}};
  CHECK_THROWS_AS(
      grid_search(ds, grid, small_recipe(), 1, MetricKind::Rmse, 11),
      InvalidInput);
}
