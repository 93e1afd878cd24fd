#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rfrboost/losses.hpp"
#include "rfrboost/matrix.hpp"

namespace rfrboost {

enum class TaskKind { Regression, Classification };

struct ColumnMeta {
  std::string name;
  bool categorical = false;
  std::vector<std::string> levels;  // level strings, in order of first appearance
};

// Feature matrix plus targets. For categorical columns X holds the level
// index (or -1 for a level unseen by the preprocessor fit).
struct Dataset {
  Matrix X;  // n x q
  TaskKind task = TaskKind::Regression;
  Matrix Y;          // n x d (regression)
  IntVector labels;  // length n (classification)
  int classes = 0;
  std::vector<ColumnMeta> columns;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index q() const { return X.cols(); }
  Targets targets() const;
  Dataset select_rows(const std::vector<int>& idx) const;
};

struct CsvSchema {
  std::string target;                     // target column name
  TaskKind task = TaskKind::Regression;
  std::vector<std::string> categorical;   // categorical feature columns
};

// Comma-separated, header row, UTF-8, '.' decimal; missing values rejected.
Dataset load_csv(const std::string& path, const CsvSchema& schema);
Dataset parse_csv(const std::string& text, const CsvSchema& schema,
                  const std::string& origin = "<string>");

// One-hot expansion and train-only standardization. Fit on the training
// split, apply to any split. Zero-variance columns pass through with scale 1;
// unseen categorical levels map to an all-zero indicator block.
class Preprocessor {
 public:
  static Preprocessor fit(const Dataset& train);
  Dataset transform(const Dataset& ds) const;
  Eigen::Index output_dim() const;

 private:
  struct ColumnPlan {
    bool categorical = false;
    std::vector<int> levels;  // level indices kept from the training split
    double mean = 0.0;
    double scale = 1.0;
  };
  std::vector<ColumnPlan> plans_;
};

// Points on `rings` nested circles of radius (j+1)/rings, class j mod classes,
// with isotropic Gaussian noise.
Dataset make_concentric_circles(int n, int rings, int classes, double noise_sd,
                                std::uint64_t seed);

struct CvPlan {
  int k = 5;
  std::vector<int> fold_of;  // fold index per row
};

CvPlan make_folds(int n, int k, std::uint64_t seed);

enum class MetricKind { Rmse, Accuracy };

double rmse(const Matrix& predictions, const Matrix& truth);
double accuracy(const IntVector& predictions, const IntVector& truth);

// Trains on the preprocessed train split (with a fold-derived seed) and
// returns held-out predictions as a metric value.
using FoldEvaluator = std::function<double(
    const Dataset& train, const Dataset& test, std::uint64_t seed)>;

struct CvResult {
  std::vector<double> fold_scores;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n-1)
};

CvResult kfold_evaluate(const Dataset& data, int k, const FoldEvaluator& eval,
                        std::uint64_t seed, bool parallel = false);

}  // namespace rfrboost
