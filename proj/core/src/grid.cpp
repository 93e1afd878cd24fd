#include "rfrboost/grid.hpp"

#include <cmath>
#include <thread>

#include "rfrboost/rng.hpp"

namespace rfrboost {

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (const auto& [name, values] : axes) {
    require(!values.empty(), "grid axis '" + name + "' is empty");
    total *= values.size();
  }
  return total;
}

void apply_axis(ModelRecipe& recipe, const std::string& name, double value) {
  TrainConfig& cfg = recipe.cfg;
  if (name == "layers") {
    cfg.layers = static_cast<int>(std::llround(value));
  } else if (name == "eta") {
    cfg.eta = value;
  } else if (name == "lambda_w") {
    cfg.lambda_w = value;
  } else if (name == "lambda_a") {
    cfg.lambda_a = value;
  } else if (name == "features_per_block") {
    cfg.features_per_block = static_cast<int>(std::llround(value));
  } else if (name == "feature_scale") {
    cfg.feature_scale = value;
  } else if (name == "hidden_dim") {
    cfg.hidden_dim = static_cast<int>(std::llround(value));
  } else {
    throw ConfigError("unknown grid axis '" + name + "'");
  }
}

namespace {

// Grid point g with the first axis varying slowest.
ModelRecipe recipe_at(const GridSpec& grid, const ModelRecipe& base,
                      std::size_t g, std::map<std::string, double>* point) {
  ModelRecipe recipe = base;
  std::size_t stride = grid.size();
  std::size_t rem = g;
  for (const auto& [name, values] : grid.axes) {
    stride /= values.size();
    const double value = values[rem / stride];
    rem %= stride;
    apply_axis(recipe, name, value);
    if (point) (*point)[name] = value;
  }
  return recipe;
}

// True when the candidate strictly beats the incumbent, with the
// deterministic tie-break on equal CV means.
bool beats(const GridRow& cand, const ModelRecipe& cand_recipe,
           const GridRow& best, const ModelRecipe& best_recipe,
           MetricKind metric) {
  if (cand.cv.mean != best.cv.mean) {
    return metric == MetricKind::Rmse ? cand.cv.mean < best.cv.mean
                                      : cand.cv.mean > best.cv.mean;
  }
  if (cand_recipe.cfg.layers != best_recipe.cfg.layers) {
    return cand_recipe.cfg.layers < best_recipe.cfg.layers;
  }
  if (cand_recipe.cfg.lambda_w != best_recipe.cfg.lambda_w) {
    return cand_recipe.cfg.lambda_w > best_recipe.cfg.lambda_w;
  }
  return false;  // enumeration order: keep the earlier point
}

}  // namespace

GridResult grid_search(const Dataset& train, const GridSpec& grid,
                       const ModelRecipe& base, int inner_k, MetricKind metric,
                       std::uint64_t seed, bool parallel) {
  require(inner_k >= 2, "grid_search: inner_k must be >= 2");
  const std::size_t total = grid.size();

  GridResult result;
  result.table.resize(total);
  std::vector<ModelRecipe> recipes(total);

  auto run_point = [&](std::size_t g) {
    GridRow& row = result.table[g];
    recipes[g] = recipe_at(grid, base, g, &row.point);
    const std::uint64_t point_seed = Rng::derive_seed(seed, g);
    const ModelRecipe& recipe = recipes[g];
    row.cv = kfold_evaluate(
        train, inner_k,
        [&recipe, metric](const Dataset& tr, const Dataset& te,
                          std::uint64_t s) {
          const BoostedModel model = train_recipe(recipe, tr, s);
          return evaluate_metric(model, te, metric);
        },
        point_seed);
  };

  if (parallel && total > 1) {
    const unsigned workers =
        std::min<unsigned>(std::thread::hardware_concurrency(),
                           static_cast<unsigned>(total));
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (std::size_t g = w; g < total; g += workers) run_point(g);
      });
    }
    for (auto& t : threads) t.join();
  } else {
    for (std::size_t g = 0; g < total; ++g) run_point(g);
  }

  result.best_index = 0;
  for (std::size_t g = 1; g < total; ++g) {
    if (beats(result.table[g], recipes[g], result.table[result.best_index],
              recipes[result.best_index], metric)) {
      result.best_index = g;
    }
  }
  result.best_recipe = recipes[result.best_index];
  return result;
}

}  // namespace rfrboost
