#include "rfrboost/boosting.hpp"

#include <cmath>

#include "rfrboost/rng.hpp"

namespace rfrboost {

NormStats fit_norm(const Matrix& F) {
  const auto n = static_cast<double>(F.rows());
  NormStats stats;
  stats.mean = F.colwise().mean();
  RowVector var = (F.rowwise() - stats.mean).array().square().colwise().sum() / n;
  stats.scale = var.array().sqrt();
  for (Eigen::Index j = 0; j < stats.scale.size(); ++j) {
    if (stats.scale(j) <= 1e-12) stats.scale(j) = 1.0;
  }
  return stats;
}

Matrix apply_norm(const NormStats& stats, const Matrix& F) {
  return (F.rowwise() - stats.mean).array().rowwise() / stats.scale.array();
}

void TrainConfig::validate() const {
  require(layers >= 0, "config: layer count must be >= 0");
  require(eta > 0.0 && eta <= 1.0, "config: eta must be in (0, 1]");
  require(lambda_w >= 0.0 && lambda_a >= 0.0, "config: negative ridge weight");
  require(features_per_block >= 1, "config: features_per_block must be >= 1");
  require(feature_scale >= 0.0, "config: negative feature scale");
  require(hidden_dim >= 0, "config: negative hidden_dim");
}

namespace {

// SWIM target differences use regression targets directly and one-hot
// vectors for classification.
Matrix swim_targets(const Dataset& data) {
  if (data.task == TaskKind::Regression) return data.Y;
  return one_hot(data.labels, data.classes);
}

// BCE reads a single 0/1 column instead of the one-hot pair.
Targets targets_for(const Dataset& data, LossKind kind) {
  Targets t = data.targets();
  if (kind == LossKind::Bce && data.task == TaskKind::Classification) {
    require(data.classes == 2, "BCE requires exactly two classes");
    t.values = data.labels.cast<double>();
  }
  return t;
}

RandomFeatureLayer sample_block_layer(const TrainConfig& cfg, const Matrix& phi,
                                      const Matrix& x, const Matrix& targets,
                                      Rng& rng) {
  if (cfg.scheme == FeatureScheme::Iid) {
    return sample_iid_layer(static_cast<int>(phi.cols() + x.cols()),
                            cfg.features_per_block, cfg.feature_scale, rng);
  }
  Matrix inputs(phi.rows(), phi.cols() + x.cols());
  inputs << phi, x;
  return sample_swim_layer(inputs, targets, cfg.features_per_block,
                           swim_from_scale(cfg.feature_scale), rng);
}

InitialMap make_phi0(const Dataset& data, const TrainConfig& cfg, Rng& rng) {
  InitialMap phi0;
  if (cfg.hidden_dim == 0) {
    phi0.kind = Phi0Kind::Identity;
    return phi0;
  }
  phi0.kind = Phi0Kind::RandomProjection;
  phi0.projection.resize(cfg.hidden_dim, data.q());
  const double scale = 1.0 / std::sqrt(static_cast<double>(data.q()));
  for (Eigen::Index i = 0; i < phi0.projection.rows(); ++i) {
    for (Eigen::Index j = 0; j < phi0.projection.cols(); ++j) {
      phi0.projection(i, j) = scale * rng.normal();
    }
  }
  return phi0;
}

Matrix initial_representation(const InitialMap& phi0, const Matrix& X) {
  switch (phi0.kind) {
    case Phi0Kind::Identity:
      return X;
    case Phi0Kind::RandomProjection:
      require(X.cols() == phi0.projection.cols(),
              "predict: feature count does not match initial projection");
      return X * phi0.projection.transpose();
    case Phi0Kind::RandomFeatures: {
      Matrix F = apply_layer(phi0.layer, Matrix(X.rows(), 0), X);
      if (phi0.norm) F = apply_norm(*phi0.norm, F);
      return F;
    }
  }
  return X;
}

Matrix block_update(const ResidualBlock& block, const Matrix& F) {
  switch (block.structure) {
    case SandwichStructure::Scalar:
      return block.step * std::get<double>(block.coeff) * F;
    case SandwichStructure::Diagonal:
      return block.step * (F.array().rowwise() *
                           std::get<Vector>(block.coeff).transpose().array())
                              .matrix();
    case SandwichStructure::Dense:
      return block.step * F * std::get<Matrix>(block.coeff).transpose();
  }
  return F;
}

}  // namespace

BoostedModel train_greedy_mse(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  require(data.task == TaskKind::Regression,
          "train_greedy_mse requires regression targets");
  const Targets targets = data.targets();
  const Matrix& X = data.X;

  BoostedModel model;
  model.loss = LossKind::Mse;
  model.config = cfg;
  model.input_dim = static_cast<int>(data.q());

  Rng rng0 = Rng::derive(cfg.seed, 0);
  model.phi0 = make_phi0(data, cfg, rng0);
  Matrix Phi = initial_representation(model.phi0, X);
  const auto D = Phi.cols();
  model.representation_dim = static_cast<int>(D);
  if (cfg.structure != SandwichStructure::Dense) {
    require(cfg.features_per_block == D,
            "scalar/diagonal structure requires features_per_block = hidden dim");
  }

  model.head = fit_affine_head(LossKind::Mse, Phi, targets, cfg.lambda_w);
  model.risk_trace.push_back(
      risk_from_logits(LossKind::Mse, head_logits(model.head, Phi), targets));

  const Matrix swim_t = swim_targets(data);
  for (int t = 1; t <= cfg.layers; ++t) {
    ResidualBlock block;
    block.structure = cfg.structure;
    block.step = 0.0;

    // One resample on a degenerate (dead) layer, then skip the round.
    bool solved = false;
    for (int attempt = 0; attempt < 2 && !solved; ++attempt) {
      Rng rng = Rng::derive(cfg.seed,
                            static_cast<std::uint64_t>(t) +
                                (attempt == 0 ? 0 : 1ULL << 32));
      block.layer = sample_block_layer(cfg, Phi, X, swim_t, rng);
      Matrix F = apply_layer(block.layer, Phi, X);
      if (cfg.feature_norm) {
        block.norm = fit_norm(F);
        F = apply_norm(*block.norm, F);
      }
      const Matrix residuals = targets.values - head_logits(model.head, Phi);
      SandwichProblem prob{residuals, model.head.W, F, cfg.lambda_a};
      try {
        switch (cfg.structure) {
          case SandwichStructure::Scalar:
            block.coeff = sandwich_scalar(prob);
            break;
          case SandwichStructure::Diagonal:
            block.coeff = sandwich_diag(prob);
            break;
          case SandwichStructure::Dense:
            block.coeff = sandwich_dense(prob);
            break;
        }
        block.step = cfg.eta;
        Phi += block_update(block, F);
        solved = true;
      } catch (const DegenerateProblem&) {
        // retry with a fresh layer, or skip the round with step = 0
      }
    }
    if (!solved) {
      switch (cfg.structure) {
        case SandwichStructure::Scalar:
          block.coeff = 0.0;
          break;
        case SandwichStructure::Diagonal:
          block.coeff = Vector(Vector::Zero(D));
          break;
        case SandwichStructure::Dense:
          block.coeff = Matrix(Matrix::Zero(D, cfg.features_per_block));
          break;
      }
    }
    model.blocks.push_back(std::move(block));
    model.head = fit_affine_head(LossKind::Mse, Phi, targets, cfg.lambda_w);
    model.risk_trace.push_back(
        risk_from_logits(LossKind::Mse, head_logits(model.head, Phi), targets));
  }
  return model;
}

BoostedModel train_gradient(const Dataset& data, const TrainConfig& cfg,
                            LossKind kind) {
  cfg.validate();
  if (kind != LossKind::Mse) {
    require(data.task == TaskKind::Classification,
            "classification losses require classification targets");
  }
  const Targets targets = targets_for(data, kind);
  const Matrix& X = data.X;

  BoostedModel model;
  model.loss = kind;
  model.config = cfg;
  model.input_dim = static_cast<int>(data.q());

  Rng rng0 = Rng::derive(cfg.seed, 0);
  model.phi0 = make_phi0(data, cfg, rng0);
  Matrix Phi = initial_representation(model.phi0, X);
  model.representation_dim = static_cast<int>(Phi.cols());

  model.head = fit_affine_head(kind, Phi, targets, cfg.lambda_w);
  model.risk_trace.push_back(
      risk_from_logits(kind, head_logits(model.head, Phi), targets));

  const Matrix swim_t = swim_targets(data);
  for (int t = 1; t <= cfg.layers; ++t) {
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(t));
    ResidualBlock block;
    block.structure = SandwichStructure::Dense;
    block.layer = sample_block_layer(cfg, Phi, X, swim_t, rng);
    Matrix F = apply_layer(block.layer, Phi, X);
    if (cfg.feature_norm) {
      block.norm = fit_norm(F);
      F = apply_norm(*block.norm, F);
    }

    const Matrix logits = head_logits(model.head, Phi);
    const Matrix G = dloss_dlogits(kind, logits, targets) * model.head.W.transpose();
    if (G.norm() <= 1e-12) break;  // converged: return the completed blocks
    Matrix A;
    try {
      A = fit_gradient_direction(F, G, cfg.lambda_a);
    } catch (const ZeroGradient&) {
      break;
    }
    const Matrix direction = F * A.transpose();  // n x D
    const double alpha =
        line_search_logits(kind, logits, direction * model.head.W, targets);

    block.coeff = std::move(A);
    block.step = cfg.eta * alpha;
    Phi += block.step * direction;
    model.blocks.push_back(std::move(block));

    model.head = fit_affine_head(kind, Phi, targets, cfg.lambda_w, &model.head);
    model.risk_trace.push_back(
        risk_from_logits(kind, head_logits(model.head, Phi), targets));
  }
  return model;
}

BoostedModel train_rfnn(const Dataset& data, int p, FeatureScheme scheme,
                        double scale, double lambda, LossKind kind,
                        std::uint64_t seed, bool feature_norm) {
  require(p >= 1, "train_rfnn: width must be positive");
  const Targets targets = targets_for(data, kind);

  BoostedModel model;
  model.loss = kind;
  model.input_dim = static_cast<int>(data.q());
  model.representation_dim = p;
  model.config.layers = 0;
  model.config.features_per_block = p;
  model.config.scheme = scheme;
  model.config.feature_scale = scale;
  model.config.lambda_w = lambda;
  model.config.seed = seed;
  model.config.feature_norm = feature_norm;

  Rng rng = Rng::derive(seed, 0);
  model.phi0.kind = Phi0Kind::RandomFeatures;
  if (scheme == FeatureScheme::Iid) {
    model.phi0.layer = sample_iid_layer(static_cast<int>(data.q()), p, scale, rng);
  } else {
    model.phi0.layer =
        sample_swim_layer(data.X, swim_targets(data), p, swim_from_scale(scale), rng);
  }
  Matrix F = apply_layer(model.phi0.layer, Matrix(data.n(), 0), data.X);
  if (feature_norm) {
    model.phi0.norm = fit_norm(F);
    F = apply_norm(*model.phi0.norm, F);
  }
  model.head = fit_affine_head(kind, F, targets, lambda);
  model.risk_trace.push_back(
      risk_from_logits(kind, head_logits(model.head, F), targets));
  return model;
}

BoostedModel train_linear(const Dataset& data, double lambda, LossKind kind) {
  const Targets targets = targets_for(data, kind);
  BoostedModel model;
  model.loss = kind;
  model.input_dim = static_cast<int>(data.q());
  model.representation_dim = static_cast<int>(data.q());
  model.config.layers = 0;
  model.config.lambda_w = lambda;
  model.phi0.kind = Phi0Kind::Identity;
  model.head = fit_affine_head(kind, data.X, targets, lambda);
  model.risk_trace.push_back(risk_from_logits(
      kind, head_logits(model.head, data.X), targets));
  return model;
}

BoostedModel train_recipe(const ModelRecipe& recipe, const Dataset& data,
                          std::uint64_t seed) {
  TrainConfig cfg = recipe.cfg;
  cfg.seed = seed;
  switch (recipe.algo) {
    case Algorithm::Greedy:
      return train_greedy_mse(data, cfg);
    case Algorithm::Gradient:
      return train_gradient(data, cfg, recipe.loss);
    case Algorithm::Rfnn:
      return train_rfnn(data, cfg.features_per_block, cfg.scheme,
                        cfg.feature_scale, cfg.lambda_w, recipe.loss, seed,
                        cfg.feature_norm);
    case Algorithm::Ridge:
      return train_linear(data, cfg.lambda_w, LossKind::Mse);
    case Algorithm::Logistic:
      return train_linear(data, cfg.lambda_w, LossKind::Cce);
  }
  throw InvalidInput("unknown algorithm");
}

Matrix predict_representation(const BoostedModel& model, const Matrix& X,
                              int upto_blocks) {
  require_finite(X, "predict input");
  require(X.cols() == model.input_dim,
          "predict: expected " + std::to_string(model.input_dim) +
              " features, found " + std::to_string(X.cols()));
  Matrix Phi = initial_representation(model.phi0, X);
  const int limit = upto_blocks < 0 ? static_cast<int>(model.blocks.size())
                                    : upto_blocks;
  for (int t = 0; t < limit && t < static_cast<int>(model.blocks.size()); ++t) {
    const ResidualBlock& block = model.blocks[t];
    if (block.step == 0.0) continue;
    Matrix F = apply_layer(block.layer, Phi, X);
    if (block.norm) F = apply_norm(*block.norm, F);
    Phi += block_update(block, F);
  }
  return Phi;
}

Matrix predict_raw(const BoostedModel& model, const Matrix& X) {
  return head_logits(model.head, predict_representation(model, X));
}

Prediction predict(const BoostedModel& model, const Matrix& X) {
  const Matrix raw = predict_raw(model, X);
  Prediction out;
  switch (model.loss) {
    case LossKind::Mse:
      out.values = raw;
      break;
    case LossKind::Bce: {
      out.values = (1.0 / (1.0 + (-raw.array()).exp())).matrix();
      out.labels.resize(raw.rows());
      for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        out.labels(i) = raw(i, 0) > 0.0 ? 1 : 0;
      }
      break;
    }
    case LossKind::Cce: {
      Matrix shifted = raw.colwise() - raw.rowwise().maxCoeff();
      Matrix expd = shifted.array().exp().matrix();
      out.values = expd.array().colwise() / expd.rowwise().sum().array();
      out.labels.resize(raw.rows());
      for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        Eigen::Index best;
        raw.row(i).maxCoeff(&best);
        out.labels(i) = static_cast<int>(best);
      }
      break;
    }
  }
  return out;
}

double evaluate_metric(const BoostedModel& model, const Dataset& data,
                       MetricKind metric) {
  const Prediction pred = predict(model, data.X);
  if (metric == MetricKind::Rmse) {
    return rmse(pred.values, data.Y);
  }
  return accuracy(pred.labels, data.labels);
}

}  // namespace rfrboost
