// Command-line front end: train/evaluate/cv/gridcv on CSV data, plus the
// self-contained concentric-circles experiment with per-layer representation
// dumps.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfrboost/boosting.hpp"
#include "rfrboost/grid.hpp"
#include "rfrboost/rng.hpp"
#include "rfrboost/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rfrboost;

namespace {

// Shortest round-trip decimal, stable across runs.
std::string fmt(double x) { return json(x).dump(); }

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  return j;
}

// Unknown keys are config errors; catches typos before any compute.
void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

TaskKind parse_task(const std::string& s) {
  if (s == "regression") return TaskKind::Regression;
  if (s == "classification") return TaskKind::Classification;
  throw ConfigError("task must be 'regression' or 'classification'");
}

SandwichStructure parse_structure(const std::string& s) {
  if (s == "scalar") return SandwichStructure::Scalar;
  if (s == "diagonal") return SandwichStructure::Diagonal;
  if (s == "dense") return SandwichStructure::Dense;
  throw ConfigError("structure must be scalar, diagonal, or dense");
}

FeatureScheme parse_scheme(const std::string& s) {
  if (s == "iid") return FeatureScheme::Iid;
  if (s == "swim") return FeatureScheme::Swim;
  throw ConfigError("feature_scheme must be 'iid' or 'swim'");
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "greedy") return Algorithm::Greedy;
  if (s == "gradient") return Algorithm::Gradient;
  if (s == "rfnn") return Algorithm::Rfnn;
  if (s == "ridge") return Algorithm::Ridge;
  if (s == "logistic") return Algorithm::Logistic;
  throw ConfigError(
      "algorithm must be greedy, gradient, rfnn, ridge, or logistic");
}

LossKind parse_loss(const std::string& s) {
  if (s == "mse") return LossKind::Mse;
  if (s == "bce") return LossKind::Bce;
  if (s == "cce") return LossKind::Cce;
  throw ConfigError("loss must be mse, bce, or cce");
}

Dataset load_data(const json& cfg) {
  if (!cfg.contains("data")) throw ConfigError("config needs a 'data' section");
  const json& d = cfg.at("data");
  check_keys(d, {"path", "target", "task", "categorical"}, "data");
  if (!d.contains("path") || !d.contains("target") || !d.contains("task")) {
    throw ConfigError("data section needs 'path', 'target', and 'task'");
  }
  CsvSchema schema;
  schema.target = d.at("target").get<std::string>();
  schema.task = parse_task(d.at("task").get<std::string>());
  schema.categorical = get_or<std::vector<std::string>>(d, "categorical", {});
  return load_csv(d.at("path").get<std::string>(), schema);
}

// Hyperparameter names mirror the training config surface: n_layers,
// boost_lr, l2_linpred, l2_ghat, feature_dim, swim_scale.
ModelRecipe parse_recipe(const json& cfg, TaskKind task) {
  if (!cfg.contains("model")) throw ConfigError("config needs a 'model' section");
  const json& m = cfg.at("model");
  check_keys(m,
             {"algorithm", "loss", "n_layers", "boost_lr", "l2_linpred",
              "l2_ghat", "feature_dim", "structure", "feature_scheme",
              "swim_scale", "use_feature_norm", "hidden_dim"},
             "model");
  if (!m.contains("algorithm")) throw ConfigError("model section needs 'algorithm'");

  ModelRecipe recipe;
  recipe.algo = parse_algorithm(m.at("algorithm").get<std::string>());
  recipe.loss = task == TaskKind::Regression ? LossKind::Mse : LossKind::Cce;
  if (m.contains("loss")) recipe.loss = parse_loss(m.at("loss").get<std::string>());
  if (recipe.algo == Algorithm::Greedy && recipe.loss != LossKind::Mse) {
    throw ConfigError("greedy training supports only the mse loss");
  }

  TrainConfig& c = recipe.cfg;
  c.layers = get_or(m, "n_layers", c.layers);
  c.eta = get_or(m, "boost_lr", c.eta);
  c.lambda_w = get_or(m, "l2_linpred", c.lambda_w);
  c.lambda_a = get_or(m, "l2_ghat", c.lambda_a);
  c.features_per_block = get_or(m, "feature_dim", c.features_per_block);
  c.structure = parse_structure(get_or<std::string>(m, "structure", "dense"));
  c.scheme = parse_scheme(get_or<std::string>(m, "feature_scheme", "swim"));
  c.feature_scale = get_or(m, "swim_scale", c.feature_scale);
  c.feature_norm = get_or(m, "use_feature_norm", c.feature_norm);
  c.hidden_dim = get_or(m, "hidden_dim", c.hidden_dim);
  c.validate();
  return recipe;
}

// Scalar/diagonal blocks need p = D; reject before any training starts.
void validate_shape(const ModelRecipe& recipe, const Dataset& data) {
  if (recipe.cfg.structure == SandwichStructure::Dense) return;
  if (recipe.algo != Algorithm::Greedy && recipe.algo != Algorithm::Gradient) return;
  const int D = recipe.cfg.hidden_dim > 0 ? recipe.cfg.hidden_dim
                                          : static_cast<int>(data.q());
  if (recipe.cfg.features_per_block != D) {
    throw ConfigError(
        "scalar/diagonal structure requires feature_dim = representation dim (" +
        std::to_string(recipe.cfg.features_per_block) + " vs " +
        std::to_string(D) + ")");
  }
}

std::uint64_t pick_seed(const json& cfg, const std::optional<std::uint64_t>& cli_seed) {
  if (cli_seed) return *cli_seed;
  return get_or<std::uint64_t>(cfg, "seed", 0);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot open '" + path.string() + "' for writing");
  out << text;
}

MetricKind task_metric(const Dataset& data) {
  return data.task == TaskKind::Regression ? MetricKind::Rmse
                                           : MetricKind::Accuracy;
}

std::string metric_name(MetricKind m) {
  return m == MetricKind::Rmse ? "rmse" : "accuracy";
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- commands -------------------------------------------------------------

int cmd_train(const json& cfg, std::optional<std::uint64_t> cli_seed,
              const fs::path& out) {
  check_keys(cfg, {"data", "model", "seed"}, "config");
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = load_data(cfg);
  const ModelRecipe recipe = parse_recipe(cfg, data.task);
  validate_shape(recipe, data);
  const std::uint64_t seed = pick_seed(cfg, cli_seed);

  const BoostedModel model = train_recipe(recipe, data, seed);
  fs::create_directories(out);
  save_model(model, (out / "model.json").string());

  std::ostringstream report;
  report << "seed: " << seed << "\n";
  report << "rounds: " << model.blocks.size() << "\n";
  for (std::size_t t = 0; t < model.risk_trace.size(); ++t) {
    report << "risk[" << t << "]: " << fmt(model.risk_trace[t]) << "\n";
  }
  const std::string deterministic = report.str();
  write_text(out / "train_report.txt",
             deterministic + "wall_clock_seconds: " + fmt(elapsed_s(t0)) + "\n");
  std::cout << deterministic;
  std::cout << "model: " << (out / "model.json").string() << "\n";
  return 0;
}

int cmd_evaluate(const json& cfg, std::optional<std::uint64_t>, const fs::path&) {
  check_keys(cfg, {"data", "evaluate", "seed"}, "config");
  if (!cfg.contains("evaluate")) {
    throw ConfigError("config needs an 'evaluate' section with a model path");
  }
  const json& e = cfg.at("evaluate");
  check_keys(e, {"model"}, "evaluate");
  if (!e.contains("model")) throw ConfigError("evaluate section needs 'model'");

  const BoostedModel model = load_model(e.at("model").get<std::string>());
  const Dataset data = load_data(cfg);
  const MetricKind metric = task_metric(data);
  const double score = evaluate_metric(model, data, metric);
  std::cout << metric_name(metric) << ": " << fmt(score) << "\n";
  return 0;
}

int cmd_cv(const json& cfg, std::optional<std::uint64_t> cli_seed,
           const fs::path& out) {
  check_keys(cfg, {"data", "model", "seed", "cv"}, "config");
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = load_data(cfg);
  const ModelRecipe recipe = parse_recipe(cfg, data.task);
  validate_shape(recipe, data);
  const std::uint64_t seed = pick_seed(cfg, cli_seed);

  int k = 5;
  bool parallel = false;
  if (cfg.contains("cv")) {
    check_keys(cfg.at("cv"), {"k", "parallel"}, "cv");
    k = get_or(cfg.at("cv"), "k", k);
    parallel = get_or(cfg.at("cv"), "parallel", parallel);
  }

  const MetricKind metric = task_metric(data);
  const CvResult cv = kfold_evaluate(
      data, k,
      [&recipe, metric](const Dataset& tr, const Dataset& te, std::uint64_t s) {
        return evaluate_metric(train_recipe(recipe, tr, s), te, metric);
      },
      seed, parallel);

  std::ostringstream report;
  report << "metric: " << metric_name(metric) << "\n";
  report << "folds: " << k << "\n";
  report << "seed: " << seed << "\n";
  for (std::size_t i = 0; i < cv.fold_scores.size(); ++i) {
    report << "fold[" << i << "]: " << fmt(cv.fold_scores[i]) << "\n";
  }
  report << "mean: " << fmt(cv.mean) << "\n";
  report << "sd: " << fmt(cv.sd) << "\n";
  const std::string deterministic = report.str();
  fs::create_directories(out);
  write_text(out / "cv_report.txt",
             deterministic + "wall_clock_seconds: " + fmt(elapsed_s(t0)) + "\n");
  std::cout << deterministic;
  return 0;
}

int cmd_gridcv(const json& cfg, std::optional<std::uint64_t> cli_seed,
               const fs::path& out) {
  check_keys(cfg, {"data", "model", "seed", "cv", "grid"}, "config");
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = load_data(cfg);
  const ModelRecipe recipe = parse_recipe(cfg, data.task);
  const std::uint64_t seed = pick_seed(cfg, cli_seed);
  if (!cfg.contains("grid")) throw ConfigError("config needs a 'grid' section");

  // Config axis names map onto TrainConfig fields.
  const std::vector<std::pair<std::string, std::string>> axis_names = {
      {"n_layers", "layers"},           {"boost_lr", "eta"},
      {"l2_linpred", "lambda_w"},       {"l2_ghat", "lambda_a"},
      {"feature_dim", "features_per_block"}, {"swim_scale", "feature_scale"},
      {"hidden_dim", "hidden_dim"}};
  GridSpec grid;
  std::vector<std::string> allowed;
  for (const auto& [cfg_name, _] : axis_names) allowed.push_back(cfg_name);
  check_keys(cfg.at("grid"), allowed, "grid");
  for (const auto& [cfg_name, axis] : axis_names) {
    if (!cfg.at("grid").contains(cfg_name)) continue;
    grid.axes.emplace_back(
        axis, cfg.at("grid").at(cfg_name).get<std::vector<double>>());
  }
  if (grid.axes.empty()) throw ConfigError("grid section has no axes");

  int k = 5;
  bool parallel = false;
  if (cfg.contains("cv")) {
    check_keys(cfg.at("cv"), {"k", "parallel"}, "cv");
    k = get_or(cfg.at("cv"), "k", k);
    parallel = get_or(cfg.at("cv"), "parallel", parallel);
  }
  const MetricKind metric = task_metric(data);
  const GridResult result =
      grid_search(data, grid, recipe, k, metric, seed, parallel);

  std::ostringstream report;
  report << "metric: " << metric_name(metric) << "\n";
  report << "points: " << result.table.size() << "\n";
  for (std::size_t g = 0; g < result.table.size(); ++g) {
    report << "point[" << g << "]:";
    for (const auto& [name, value] : result.table[g].point) {
      report << " " << name << "=" << fmt(value);
    }
    report << " mean=" << fmt(result.table[g].cv.mean)
           << " sd=" << fmt(result.table[g].cv.sd) << "\n";
  }
  report << "best_index: " << result.best_index << "\n";
  const std::string deterministic = report.str();
  fs::create_directories(out);
  write_text(out / "gridcv_report.txt",
             deterministic + "wall_clock_seconds: " + fmt(elapsed_s(t0)) + "\n");
  std::cout << deterministic;
  return 0;
}

int cmd_pointcloud(const json& cfg, std::optional<std::uint64_t> cli_seed,
                   const fs::path& out) {
  check_keys(cfg, {"seed", "pointcloud"}, "config");
  json pc = cfg.contains("pointcloud") ? cfg.at("pointcloud") : json::object();
  check_keys(pc, {"n", "rings", "classes", "noise_sd", "seeds", "n_layers",
                  "feature_dim"},
             "pointcloud");
  const int n = get_or(pc, "n", 10000);
  const int rings = get_or(pc, "rings", 9);
  const int classes = get_or(pc, "classes", 3);
  const double noise_sd = get_or(pc, "noise_sd", 0.01);
  const int n_seeds = get_or(pc, "seeds", 1);
  const int layers = get_or(pc, "n_layers", 3);
  const int p = get_or(pc, "feature_dim", 512);
  const std::uint64_t seed = pick_seed(cfg, cli_seed);

  // 2-D circles, hidden size restricted to the input dimension.
  TrainConfig boost_cfg;
  boost_cfg.layers = layers;
  boost_cfg.eta = 1.0;
  boost_cfg.lambda_w = 1e-4;
  // Ridge weights follow the repo-wide n-scaled convention; 2e-8 at
  // n_train = 5000 matches an unscaled penalty of 1e-4.
  boost_cfg.lambda_a = 2e-8;
  boost_cfg.features_per_block = p;
  boost_cfg.structure = SandwichStructure::Dense;
  boost_cfg.scheme = FeatureScheme::Swim;
  boost_cfg.feature_scale = 1.0;
  boost_cfg.feature_norm = true;

  fs::create_directories(out);
  std::ostringstream report;
  double acc_boost = 0.0, acc_rfnn = 0.0, acc_logistic = 0.0;

  for (int s = 0; s < n_seeds; ++s) {
    const std::uint64_t run_seed = Rng::derive_seed(seed, s);
    const Dataset all =
        make_concentric_circles(n, rings, classes, noise_sd, run_seed);

    // Shuffled half/half split.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng split_rng = Rng::derive(run_seed, 1);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(split_rng.uniform_below(i + 1));
      std::swap(order[i], order[j]);
    }
    const int n_train = n / 2;
    const Dataset train_raw = all.select_rows(
        std::vector<int>(order.begin(), order.begin() + n_train));
    const Dataset test_raw = all.select_rows(
        std::vector<int>(order.begin() + n_train, order.end()));
    const Preprocessor prep = Preprocessor::fit(train_raw);
    const Dataset train = prep.transform(train_raw);
    const Dataset test = prep.transform(test_raw);

    boost_cfg.seed = Rng::derive_seed(run_seed, 2);
    const BoostedModel boosted = train_gradient(train, boost_cfg, LossKind::Cce);
    const BoostedModel rfnn =
        train_rfnn(train, p, FeatureScheme::Swim, 1.0, 1e-5, LossKind::Cce,
                   Rng::derive_seed(run_seed, 3), true);
    const BoostedModel logistic = train_linear(train, 1e-4, LossKind::Cce);

    const double a1 = evaluate_metric(boosted, test, MetricKind::Accuracy);
    const double a2 = evaluate_metric(rfnn, test, MetricKind::Accuracy);
    const double a3 = evaluate_metric(logistic, test, MetricKind::Accuracy);
    acc_boost += a1;
    acc_rfnn += a2;
    acc_logistic += a3;
    report << "seed[" << s << "] rfrboost=" << fmt(a1) << " rfnn=" << fmt(a2)
           << " logistic=" << fmt(a3) << "\n";

    if (s == 0) {
      // Test-point representation after each round, for external plotting.
      for (int t = 0; t <= static_cast<int>(boosted.blocks.size()); ++t) {
        const Matrix Phi = predict_representation(boosted, test.X, t);
        std::ostringstream csv;
        csv << "phi1,phi2,label\n";
        for (Eigen::Index i = 0; i < Phi.rows(); ++i) {
          csv << fmt(Phi(i, 0)) << "," << fmt(Phi(i, 1)) << ","
              << test.labels(i) << "\n";
        }
        write_text(out / ("representation_layer_" + std::to_string(t) + ".csv"),
                   csv.str());
      }
    }
  }

  report << "rfrboost_accuracy: " << fmt(acc_boost / n_seeds) << "\n";
  report << "rfnn_accuracy: " << fmt(acc_rfnn / n_seeds) << "\n";
  report << "logistic_accuracy: " << fmt(acc_logistic / n_seeds) << "\n";
  write_text(out / "pointcloud_report.txt", report.str());
  std::cout << report.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-feature representation boosting"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;

  struct Cmd {
    const char* name;
    const char* help;
    bool needs_config;
    int (*run)(const json&, std::optional<std::uint64_t>, const fs::path&);
  };
  const Cmd cmds[] = {
      {"train", "Train a model and write it to disk", true, cmd_train},
      {"evaluate", "Score a saved model on a dataset", true, cmd_evaluate},
      {"cv", "k-fold cross-validated score for one recipe", true, cmd_cv},
      {"gridcv", "Grid search by inner k-fold cross-validation", true, cmd_gridcv},
      {"pointcloud", "Concentric-circles experiment with per-layer dumps",
       false, cmd_pointcloud},
  };

  std::map<std::string, const Cmd*> chosen;
  for (const Cmd& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    auto* opt = sub->add_option("--config", config_path, "JSON config file");
    if (c.needs_config) opt->required();
    sub->add_option("--seed", [&seed](const std::vector<std::string>& v) {
      seed = std::stoull(v.at(0));
      return true;
    }, "Seed override");
    sub->add_option("--out", out_dir, "Output directory");
    chosen[c.name] = &c;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const Cmd* cmd = chosen[app.get_subcommands().front()->get_name()];
  try {
    json cfg = json::object();
    if (!config_path.empty()) cfg = load_config(config_path);
    return cmd->run(cfg, seed, fs::path(out_dir));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IngestError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
