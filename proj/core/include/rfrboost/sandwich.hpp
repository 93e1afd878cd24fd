#pragma once

#include "rfrboost/matrix.hpp"

namespace rfrboost {

enum class SandwichStructure { Scalar, Diagonal, Dense };

// min_A (1/n) sum_i || r_i - W^T A z_i ||^2 + lambda ||A||_F^2
// with A sandwiched between the fixed top predictor W and random features z.
struct SandwichProblem {
  Matrix residuals;  // R, n x d
  Matrix top;        // W, D x d
  Matrix features;   // Z, n x p
  double lambda = 0.0;

  Eigen::Index n() const { return residuals.rows(); }
  Eigen::Index d() const { return residuals.cols(); }
  Eigen::Index D() const { return top.rows(); }
  Eigen::Index p() const { return features.cols(); }

  void validate(bool square_required) const;
};

// Scalar A. Requires p = D. Throws DegenerateProblem when lambda = 0 and ZW = 0.
double sandwich_scalar(const SandwichProblem& prob);

// Diagonal A, returned as its diagonal. Requires p = D.
// Solves (W W^T \odot Z^T Z + n lambda I) a = diag(W R^T Z).
Vector sandwich_diag(const SandwichProblem& prob);

// Dense A (D x p) via the spectral decompositions of W W^T and Z^T Z.
// Requires lambda > 0.
Matrix sandwich_dense(const SandwichProblem& prob);

// J(A) for a dense (or embedded) A; shared by solvers and tests.
double sandwich_objective(const SandwichProblem& prob, const Matrix& A);

}  // namespace rfrboost
