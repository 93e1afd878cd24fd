#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rfrboost/boosting.hpp"

namespace rfrboost {

// Finite hyperparameter grid: named axes over TrainConfig fields.
// Known axis names: layers, eta, lambda_w, lambda_a, features_per_block,
// feature_scale, hidden_dim.
struct GridSpec {
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::size_t size() const;
};

void apply_axis(ModelRecipe& recipe, const std::string& name, double value);

struct GridRow {
  std::map<std::string, double> point;
  CvResult cv;
};

struct GridResult {
  std::vector<GridRow> table;   // one row per grid point, enumeration order
  std::size_t best_index = 0;
  ModelRecipe best_recipe;
};

// Exhaustive inner k-fold CV over every grid point. Lower-is-better for RMSE,
// higher-is-better for accuracy. Ties broken deterministically by smaller
// layer count, then larger lambda_w, then enumeration order.
GridResult grid_search(const Dataset& train, const GridSpec& grid,
                       const ModelRecipe& base, int inner_k, MetricKind metric,
                       std::uint64_t seed, bool parallel = false);

}  // namespace rfrboost
