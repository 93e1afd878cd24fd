#include "rfrboost/random_features.hpp"

namespace rfrboost {

RandomFeatureLayer sample_iid_layer(int input_dim, int p, double scale,
                                    Rng& rng) {
  require(input_dim >= 1, "sample_iid_layer: input_dim must be positive");
  require(p >= 1, "sample_iid_layer: width must be positive");
  require(scale >= 0.0, "sample_iid_layer: negative scale");
  RandomFeatureLayer layer;
  layer.weights.resize(p, input_dim);
  layer.biases.resize(p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < input_dim; ++j) {
      layer.weights(i, j) = scale * rng.normal();
    }
  }
  for (int i = 0; i < p; ++i) layer.biases(i) = scale * rng.normal();
  return layer;
}

SwimCandidates swim_candidates(const Matrix& inputs, const Matrix& targets,
                               double eps, Rng& rng) {
  require_finite(inputs, "swim inputs");
  require_finite(targets, "swim targets");
  require(inputs.rows() == targets.rows(), "swim: row count mismatch");
  require(inputs.rows() >= 2, "swim: need at least two points");
  require(eps > 0.0, "swim: eps must be positive");
  const int n = static_cast<int>(inputs.rows());

  SwimCandidates cand;
  cand.first.resize(n);
  cand.second.resize(n);
  cand.weights.resize(n);

  bool any_distinct = false;
  for (int i = 0; i < n; ++i) {
    const int offset = 1 + static_cast<int>(rng.uniform_below(n - 1));
    const int j = (i + offset) % n;
    cand.first[i] = i;
    cand.second[i] = j;
    const double din = (inputs.row(j) - inputs.row(i)).norm();
    const double dtarget = (targets.row(j) - targets.row(i)).norm();
    cand.distance_evals += 1;
    if (din == 0.0) {
      // Coincident inputs cannot form a neuron.
      cand.weights(i) = 0.0;
    } else {
      any_distinct = true;
      cand.weights(i) = dtarget / (din + eps);
    }
  }
  if (!any_distinct) {
    throw DegeneratePairs("swim: all candidate pairs have coincident inputs");
  }

  const double total = cand.weights.sum();
  if (total > 0.0) {
    cand.weights /= total;
  } else {
    // All target differences vanished; fall back to uniform over distinct pairs.
    for (int i = 0; i < n; ++i) {
      const double din = (inputs.row(cand.second[i]) - inputs.row(i)).norm();
      cand.weights(i) = din > 0.0 ? 1.0 : 0.0;
    }
    cand.weights /= cand.weights.sum();
  }
  return cand;
}

namespace {

// Inverse-CDF draw from a normalized discrete distribution.
int sample_index(const Vector& weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < weights.size(); ++i) {
    acc += weights(i);
    if (u < acc) return i;
  }
  // Rounding spill: return the last positive-weight index.
  for (int i = static_cast<int>(weights.size()) - 1; i >= 0; --i) {
    if (weights(i) > 0.0) return i;
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

RandomFeatureLayer sample_swim_layer(const Matrix& inputs, const Matrix& targets,
                                     int p, const SwimConfig& cfg, Rng& rng) {
  require(p >= 1, "sample_swim_layer: width must be positive");
  const SwimCandidates cand = swim_candidates(inputs, targets, cfg.eps, rng);

  RandomFeatureLayer layer;
  layer.weights.resize(p, inputs.cols());
  layer.biases.resize(p);
  for (int i = 0; i < p; ++i) {
    const int k = sample_index(cand.weights, rng);
    const RowVector anchor = inputs.row(cand.first[k]);
    const RowVector delta = inputs.row(cand.second[k]) - anchor;
    const RowVector w = cfg.c2 * delta / delta.squaredNorm();
    layer.weights.row(i) = w;
    layer.biases(i) = -w.dot(anchor) - cfg.c1;
  }
  return layer;
}

Matrix apply_layer(const RandomFeatureLayer& layer, const Matrix& phi,
                   const Matrix& x) {
  const Eigen::Index n = phi.cols() > 0 ? phi.rows() : x.rows();
  require(phi.cols() == 0 || x.cols() == 0 || phi.rows() == x.rows(),
          "apply_layer: phi/x row count mismatch");
  require(phi.cols() + x.cols() == layer.input_dim(),
          "apply_layer: concatenated width does not match layer input_dim");

  Matrix pre(n, layer.width());
  if (phi.cols() == 0) {
    pre = x * layer.weights.transpose();
  } else if (x.cols() == 0) {
    pre = phi * layer.weights.transpose();
  } else {
    pre = phi * layer.weights.leftCols(phi.cols()).transpose() +
          x * layer.weights.rightCols(x.cols()).transpose();
  }
  pre.rowwise() += layer.biases.transpose();
  return pre.array().tanh().matrix();
}

}  // namespace rfrboost
