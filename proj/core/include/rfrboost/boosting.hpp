#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "rfrboost/data.hpp"
#include "rfrboost/losses.hpp"
#include "rfrboost/random_features.hpp"
#include "rfrboost/sandwich.hpp"

namespace rfrboost {

// Frozen per-feature standardization (training-batch mean/scale).
struct NormStats {
  RowVector mean;
  RowVector scale;
};

Matrix apply_norm(const NormStats& stats, const Matrix& F);
NormStats fit_norm(const Matrix& F);

// One boosting round: Phi <- Phi + step * F A^T with F the (optionally
// normalized) layer output and A scalar/diagonal/dense.
struct ResidualBlock {
  RandomFeatureLayer layer;
  SandwichStructure structure = SandwichStructure::Dense;
  std::variant<double, Vector, Matrix> coeff;  // A
  double step = 0.0;  // eta (greedy) or eta * alpha_t (gradient)
  std::optional<NormStats> norm;
};

enum class Phi0Kind { Identity, RandomProjection, RandomFeatures };

struct InitialMap {
  Phi0Kind kind = Phi0Kind::Identity;
  Matrix projection;                // D x q, RandomProjection only
  RandomFeatureLayer layer;         // RandomFeatures only (RFNN)
  std::optional<NormStats> norm;    // RandomFeatures only
};

struct TrainConfig {
  int layers = 3;               // T
  double eta = 1.0;             // boosting learning rate
  double lambda_w = 1e-4;       // top predictor ridge
  double lambda_a = 1e-4;       // A-fit / gradient-fit ridge
  int features_per_block = 512; // p
  SandwichStructure structure = SandwichStructure::Dense;
  FeatureScheme scheme = FeatureScheme::Swim;
  double feature_scale = 1.0;   // SWIM scale (c2) or iid std dev
  std::uint64_t seed = 0;
  bool feature_norm = false;
  int hidden_dim = 0;  // 0: identity Phi0 (D = q); else random projection to D

  void validate() const;
};

struct BoostedModel {
  InitialMap phi0;
  std::vector<ResidualBlock> blocks;
  LinearHead head;
  LossKind loss = LossKind::Mse;
  TrainConfig config;
  int input_dim = 0;
  int representation_dim = 0;

  // Per-round regularization-free training risk, rounds 0..T.
  std::vector<double> risk_trace;
};

// Algorithm-level recipes, shared by the harness and the CLI.
enum class Algorithm { Greedy, Gradient, Rfnn, Ridge, Logistic };

struct ModelRecipe {
  Algorithm algo = Algorithm::Gradient;
  LossKind loss = LossKind::Mse;
  TrainConfig cfg;
};

BoostedModel train_greedy_mse(const Dataset& data, const TrainConfig& cfg);
BoostedModel train_gradient(const Dataset& data, const TrainConfig& cfg,
                            LossKind kind);
BoostedModel train_rfnn(const Dataset& data, int p, FeatureScheme scheme,
                        double scale, double lambda, LossKind kind,
                        std::uint64_t seed, bool feature_norm = false);
BoostedModel train_linear(const Dataset& data, double lambda, LossKind kind);
BoostedModel train_recipe(const ModelRecipe& recipe, const Dataset& data,
                          std::uint64_t seed);

// Representation Phi_t of X after the first `upto_blocks` rounds
// (-1: all rounds).
Matrix predict_representation(const BoostedModel& model, const Matrix& X,
                              int upto_blocks = -1);

// W^T Phi_T(x) + b: regression predictions or classification logits.
Matrix predict_raw(const BoostedModel& model, const Matrix& X);

struct Prediction {
  Matrix values;          // regression output or class probabilities
  IntVector labels;       // classification only
};

Prediction predict(const BoostedModel& model, const Matrix& X);

double evaluate_metric(const BoostedModel& model, const Dataset& data,
                       MetricKind metric);

}  // namespace rfrboost
