#pragma once

#include <vector>

#include "rfrboost/matrix.hpp"

namespace rfrboost {

enum class LossKind { Mse, Bce, Cce };

// Targets for either task. MSE and BCE read `values` (n x d, BCE uses 0/1 in
// one column); CCE reads `labels` in 0..classes-1.
struct Targets {
  Matrix values;
  IntVector labels;
  int classes = 0;

  Eigen::Index n() const;
  Eigen::Index output_dim(LossKind kind) const;
};

Matrix one_hot(const IntVector& labels, int classes);

// Mean loss over rows of the logit matrix. MSE carries the 1/2 factor.
double risk_from_logits(LossKind kind, const Matrix& logits, const Targets& y);

// Row i is the gradient of the per-sample loss w.r.t. its logits, n x d.
Matrix dloss_dlogits(LossKind kind, const Matrix& logits, const Targets& y);

double empirical_risk(LossKind kind, const Matrix& W, const Matrix& Phi,
                      const Targets& y);

// G with G_{i,:} = W dl_1(W^T phi_i, y_i), n x D.
Matrix functional_gradient(LossKind kind, const Matrix& W, const Matrix& Phi,
                           const Targets& y);

// Ridge fit of -sqrt(n) G / ||G||_F against features F, returned D x p.
// Throws ZeroGradient when G = 0.
Matrix fit_gradient_direction(const Matrix& F, const Matrix& G, double lambda);

// alpha >= 0 minimizing risk(kind, logits0 + alpha * dlogits). Exact for MSE;
// Newton with bisection fallback otherwise.
double line_search_logits(LossKind kind, const Matrix& logits0,
                          const Matrix& dlogits, const Targets& y);

// alpha >= 0 minimizing empirical_risk(kind, W, Phi + alpha * direction, y).
double line_search(LossKind kind, const Matrix& W, const Matrix& Phi,
                   const Matrix& direction, const Targets& y);

struct TopFitResult {
  Matrix W;  // D x d
  std::vector<double> objective_trace;  // regularized objective per accepted step
};

// Top-level predictor on Phi: ridge closed form for MSE, L-BFGS on the
// l2-regularized objective for BCE/CCE. Optional warm start.
TopFitResult fit_top_linear_traced(LossKind kind, const Matrix& Phi,
                                   const Targets& y, double lambda,
                                   const Matrix* warm_start = nullptr);
Matrix fit_top_linear(LossKind kind, const Matrix& Phi, const Targets& y,
                      double lambda, const Matrix* warm_start = nullptr);

// Affine head Phi -> Phi W + 1 b^T with the intercept excluded from the ridge
// penalty. Used by the boosting loops and baselines.
struct LinearHead {
  Matrix W;     // D x d
  RowVector b;  // 1 x d
};

Matrix head_logits(const LinearHead& head, const Matrix& Phi);
LinearHead fit_affine_head(LossKind kind, const Matrix& Phi, const Targets& y,
                           double lambda, const LinearHead* warm = nullptr);

}  // namespace rfrboost
