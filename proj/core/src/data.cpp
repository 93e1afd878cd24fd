#include "rfrboost/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "rfrboost/rng.hpp"

namespace rfrboost {

Targets Dataset::targets() const {
  Targets t;
  if (task == TaskKind::Regression) {
    t.values = Y;
  } else {
    t.labels = labels;
    t.classes = classes;
    t.values = one_hot(labels, classes);
  }
  return t;
}

Dataset Dataset::select_rows(const std::vector<int>& idx) const {
  Dataset out;
  out.task = task;
  out.classes = classes;
  out.columns = columns;
  out.X.resize(idx.size(), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.X.row(i) = X.row(idx[i]);
  if (task == TaskKind::Regression) {
    out.Y.resize(idx.size(), Y.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.Y.row(i) = Y.row(idx[i]);
  } else {
    out.labels.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out.labels(i) = labels(idx[i]);
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& field, const std::string& origin,
                    int line_no, const std::string& col) {
  const std::string t = trim(field);
  if (t.empty()) {
    throw IngestError(origin + ":" + std::to_string(line_no) +
                      ": missing value in column '" + col + "'");
  }
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != t.size() || !std::isfinite(value)) {
    throw IngestError(origin + ":" + std::to_string(line_no) +
                      ": non-numeric value '" + t + "' in numeric column '" +
                      col + "'");
  }
  return value;
}

}  // namespace

Dataset parse_csv(const std::string& text, const CsvSchema& schema,
                  const std::string& origin) {
  std::stringstream stream(text);
  std::string line;
  if (!std::getline(stream, line)) {
    throw IngestError(origin + ": empty file");
  }
  const std::vector<std::string> header_raw = split_line(line);
  std::vector<std::string> header;
  header.reserve(header_raw.size());
  for (const auto& h : header_raw) header.push_back(trim(h));

  int target_idx = -1;
  std::vector<bool> is_categorical(header.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.target) target_idx = static_cast<int>(c);
    for (const auto& cat : schema.categorical) {
      if (header[c] == cat) is_categorical[c] = true;
    }
  }
  if (target_idx < 0) {
    throw IngestError(origin + ": target column '" + schema.target +
                      "' not found in header");
  }

  std::vector<std::vector<double>> feature_rows;
  std::vector<double> target_values;
  std::vector<std::string> target_labels;
  std::vector<ColumnMeta> columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) == target_idx) continue;
    columns.push_back(ColumnMeta{header[c], is_categorical[c], {}});
  }

  int line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw IngestError(origin + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(columns.size());
    std::size_t col_out = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (static_cast<int>(c) == target_idx) {
        if (schema.task == TaskKind::Regression) {
          target_values.push_back(
              parse_number(fields[c], origin, line_no, header[c]));
        } else {
          const std::string label = trim(fields[c]);
          if (label.empty()) {
            throw IngestError(origin + ":" + std::to_string(line_no) +
                              ": missing target label");
          }
          target_labels.push_back(label);
        }
        continue;
      }
      ColumnMeta& meta = columns[col_out];
      if (meta.categorical) {
        const std::string level = trim(fields[c]);
        if (level.empty()) {
          throw IngestError(origin + ":" + std::to_string(line_no) +
                            ": missing value in column '" + meta.name + "'");
        }
        auto it = std::find(meta.levels.begin(), meta.levels.end(), level);
        if (it == meta.levels.end()) {
          meta.levels.push_back(level);
          row.push_back(static_cast<double>(meta.levels.size() - 1));
        } else {
          row.push_back(
              static_cast<double>(std::distance(meta.levels.begin(), it)));
        }
      } else {
        row.push_back(parse_number(fields[c], origin, line_no, meta.name));
      }
      ++col_out;
    }
    feature_rows.push_back(std::move(row));
  }
  if (feature_rows.empty()) {
    throw IngestError(origin + ": no data rows");
  }

  Dataset ds;
  ds.task = schema.task;
  ds.columns = columns;
  ds.X.resize(feature_rows.size(), columns.size());
  for (std::size_t i = 0; i < feature_rows.size(); ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      ds.X(i, j) = feature_rows[i][j];
    }
  }
  if (schema.task == TaskKind::Regression) {
    ds.Y.resize(target_values.size(), 1);
    for (std::size_t i = 0; i < target_values.size(); ++i) {
      ds.Y(i, 0) = target_values[i];
    }
  } else {
    std::vector<std::string> classes;
    ds.labels.resize(target_labels.size());
    for (std::size_t i = 0; i < target_labels.size(); ++i) {
      auto it = std::find(classes.begin(), classes.end(), target_labels[i]);
      if (it == classes.end()) {
        classes.push_back(target_labels[i]);
        ds.labels(i) = static_cast<int>(classes.size() - 1);
      } else {
        ds.labels(i) = static_cast<int>(std::distance(classes.begin(), it));
      }
    }
    ds.classes = static_cast<int>(classes.size());
  }
  return ds;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError("cannot open '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema, path);
}

Preprocessor Preprocessor::fit(const Dataset& train) {
  Preprocessor pp;
  const auto n = static_cast<double>(train.n());
  pp.plans_.resize(train.q());
  for (Eigen::Index c = 0; c < train.q(); ++c) {
    ColumnPlan& plan = pp.plans_[c];
    const bool categorical =
        c < static_cast<Eigen::Index>(train.columns.size()) &&
        train.columns[c].categorical;
    plan.categorical = categorical;
    if (categorical) {
      // Keep only levels present in the training split, ascending by index.
      std::vector<int> seen;
      for (Eigen::Index i = 0; i < train.n(); ++i) {
        const int level = static_cast<int>(train.X(i, c));
        if (std::find(seen.begin(), seen.end(), level) == seen.end()) {
          seen.push_back(level);
        }
      }
      std::sort(seen.begin(), seen.end());
      plan.levels = std::move(seen);
    } else {
      plan.mean = train.X.col(c).mean();
      const double var =
          (train.X.col(c).array() - plan.mean).square().sum() / n;
      const double sd = std::sqrt(var);
      plan.scale = sd > 1e-12 ? sd : 1.0;  // zero-variance rule
    }
  }
  return pp;
}

Eigen::Index Preprocessor::output_dim() const {
  Eigen::Index dim = 0;
  for (const auto& plan : plans_) {
    dim += plan.categorical ? static_cast<Eigen::Index>(plan.levels.size()) : 1;
  }
  return dim;
}

Dataset Preprocessor::transform(const Dataset& ds) const {
  require(ds.q() == static_cast<Eigen::Index>(plans_.size()),
          "preprocess: column count mismatch");
  Dataset out;
  out.task = ds.task;
  out.Y = ds.Y;
  out.labels = ds.labels;
  out.classes = ds.classes;
  out.X = Matrix::Zero(ds.n(), output_dim());

  Eigen::Index col_out = 0;
  for (std::size_t c = 0; c < plans_.size(); ++c) {
    const ColumnPlan& plan = plans_[c];
    if (plan.categorical) {
      for (Eigen::Index i = 0; i < ds.n(); ++i) {
        const int level = static_cast<int>(ds.X(i, c));
        const auto it =
            std::find(plan.levels.begin(), plan.levels.end(), level);
        if (it != plan.levels.end()) {
          // Unseen levels leave the whole indicator block at zero.
          out.X(i, col_out + std::distance(plan.levels.begin(), it)) = 1.0;
        }
      }
      col_out += static_cast<Eigen::Index>(plan.levels.size());
    } else {
      out.X.col(col_out) = (ds.X.col(c).array() - plan.mean) / plan.scale;
      ++col_out;
    }
  }
  out.columns.resize(out.X.cols());
  return out;
}

Dataset make_concentric_circles(int n, int rings, int classes, double noise_sd,
                                std::uint64_t seed) {
  require(classes >= 2, "concentric circles: need at least two classes");
  require(rings >= classes, "concentric circles: rings must be >= classes");
  require(n >= 1, "concentric circles: n must be positive");

  Rng rng(seed);
  Dataset ds;
  ds.task = TaskKind::Classification;
  ds.classes = classes;
  ds.X.resize(n, 2);
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    // Cycle through rings so class counts stay balanced within +-1.
    const int ring = i % rings;
    const double radius = static_cast<double>(ring + 1) / rings;
    const double theta = 2.0 * M_PI * rng.uniform();
    ds.X(i, 0) = radius * std::cos(theta) + noise_sd * rng.normal();
    ds.X(i, 1) = radius * std::sin(theta) + noise_sd * rng.normal();
    ds.labels(i) = ring % classes;
  }
  ds.columns = {ColumnMeta{"x0", false, {}}, ColumnMeta{"x1", false, {}}};
  return ds;
}

CvPlan make_folds(int n, int k, std::uint64_t seed) {
  require(k >= 2, "make_folds: k must be >= 2");
  require(n >= k, "make_folds: n must be >= k");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  // Fisher-Yates
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(i + 1));
    std::swap(order[i], order[j]);
  }
  CvPlan plan;
  plan.k = k;
  plan.fold_of.resize(n);
  for (int i = 0; i < n; ++i) plan.fold_of[order[i]] = i % k;
  return plan;
}

double rmse(const Matrix& predictions, const Matrix& truth) {
  require(predictions.rows() == truth.rows() &&
              predictions.cols() == truth.cols(),
          "rmse: shape mismatch");
  return std::sqrt((predictions - truth).squaredNorm() /
                   static_cast<double>(truth.size()));
}

double accuracy(const IntVector& predictions, const IntVector& truth) {
  require(predictions.size() == truth.size(), "accuracy: length mismatch");
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (predictions(i) == truth(i)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

CvResult kfold_evaluate(const Dataset& data, int k, const FoldEvaluator& eval,
                        std::uint64_t seed, bool parallel) {
  const CvPlan plan = make_folds(static_cast<int>(data.n()), k, seed);

  CvResult result;
  result.fold_scores.assign(k, 0.0);
  auto run_fold = [&](int fold) {
    std::vector<int> train_idx, test_idx;
    for (int i = 0; i < static_cast<int>(data.n()); ++i) {
      (plan.fold_of[i] == fold ? test_idx : train_idx).push_back(i);
    }
    const Dataset train_raw = data.select_rows(train_idx);
    const Dataset test_raw = data.select_rows(test_idx);
    const Preprocessor pp = Preprocessor::fit(train_raw);
    const Dataset train = pp.transform(train_raw);
    const Dataset test = pp.transform(test_raw);
    result.fold_scores[fold] =
        eval(train, test,
             Rng::derive_seed(seed, static_cast<std::uint64_t>(fold)));
  };

  if (parallel) {
    std::vector<std::thread> workers;
    workers.reserve(k);
    for (int fold = 0; fold < k; ++fold) workers.emplace_back(run_fold, fold);
    for (auto& w : workers) w.join();
  } else {
    for (int fold = 0; fold < k; ++fold) run_fold(fold);
  }

  const double mean =
      std::accumulate(result.fold_scores.begin(), result.fold_scores.end(), 0.0) /
      k;
  double ss = 0.0;
  for (double s : result.fold_scores) ss += (s - mean) * (s - mean);
  result.mean = mean;
  result.sd = k > 1 ? std::sqrt(ss / (k - 1)) : 0.0;
  return result;
}

}  // namespace rfrboost
