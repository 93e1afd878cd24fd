#pragma once

#include <cstdint>
#include <vector>

#include "rfrboost/matrix.hpp"
#include "rfrboost/rng.hpp"

namespace rfrboost {

enum class FeatureScheme { Iid, Swim };

// Frozen dense layer x -> tanh(weights x + biases) over the concatenation
// [phi; x] of the current representation and the raw inputs.
struct RandomFeatureLayer {
  Matrix weights;  // p x input_dim, rows are neuron weight vectors
  Vector biases;   // length p

  Eigen::Index width() const { return weights.rows(); }
  Eigen::Index input_dim() const { return weights.cols(); }
};

struct SwimConfig {
  double c1 = 0.5;      // bias offset; pre-activation at the first anchor is -c1
  double c2 = 1.0;      // weight scale, kept at 2*c1 for symmetric centering
  double eps = 1e-6;    // density denominator guard
};

// SWIM scale hyperparameter maps to c2 with c1 = c2/2.
inline SwimConfig swim_from_scale(double scale, double eps = 1e-6) {
  return SwimConfig{scale / 2.0, scale, eps};
}

// Candidate pairs for SWIM sampling: point i paired with a uniformly random
// offset partner (i + j_i) mod n. weights holds the normalized sampling
// distribution. distance_evals counts per-point work for the linearity check.
struct SwimCandidates {
  std::vector<int> first;
  std::vector<int> second;
  Vector weights;
  long distance_evals = 0;
};

SwimCandidates swim_candidates(const Matrix& inputs, const Matrix& targets,
                               double eps, Rng& rng);

// Weights and biases i.i.d. Normal(0, scale^2).
RandomFeatureLayer sample_iid_layer(int input_dim, int p, double scale, Rng& rng);

// Pair-sampled layer: p pairs drawn with replacement proportional to the
// target-gradient density; neuron i has pre-activation -c1 at its first
// anchor and c2 - c1 at its second.
RandomFeatureLayer sample_swim_layer(const Matrix& inputs, const Matrix& targets,
                                     int p, const SwimConfig& cfg, Rng& rng);

// Row i of the result is tanh(weights [phi_i; x_i] + biases). Either phi or x
// may have zero columns.
Matrix apply_layer(const RandomFeatureLayer& layer, const Matrix& phi,
                   const Matrix& x);

}  // namespace rfrboost
