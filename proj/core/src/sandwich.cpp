#include "rfrboost/sandwich.hpp"

#include "rfrboost/linalg.hpp"

namespace rfrboost {

void SandwichProblem::validate(bool square_required) const {
  require_finite(residuals, "sandwich residuals");
  require_finite(top, "sandwich top predictor");
  require_finite(features, "sandwich features");
  require(n() >= 1, "sandwich: empty problem");
  require(features.rows() == n(), "sandwich: feature row count mismatch");
  require(top.cols() == d(), "sandwich: W column count mismatch");
  require(lambda >= 0.0, "sandwich: negative lambda");
  if (square_required) {
    require(p() == D(), "scalar/diagonal structure requires p = D");
  }
}

double sandwich_scalar(const SandwichProblem& prob) {
  prob.validate(true);
  const Matrix zw = prob.features * prob.top;  // n x d
  const double denom = zw.squaredNorm() + static_cast<double>(prob.n()) * prob.lambda;
  if (denom == 0.0) {
    throw DegenerateProblem("sandwich_scalar: ZW = 0 with lambda = 0 (dead layer)");
  }
  return prob.residuals.cwiseProduct(zw).sum() / denom;
}

Vector sandwich_diag(const SandwichProblem& prob) {
  prob.validate(true);
  const auto n = static_cast<double>(prob.n());
  // (W W^T \odot Z^T Z + n lambda I) a = diag(W R^T Z)
  Matrix system = (prob.top * prob.top.transpose())
                      .cwiseProduct(prob.features.transpose() * prob.features);
  system.diagonal().array() += n * prob.lambda;
  const Vector rhs =
      ((prob.residuals * prob.top.transpose()).cwiseProduct(prob.features))
          .colwise()
          .sum()
          .transpose();
  if (prob.lambda == 0.0) {
    Eigen::FullPivLU<Matrix> lu(system);
    if (!lu.isInvertible()) {
      throw SingularSystem("sandwich_diag: singular system at lambda = 0");
    }
    return lu.solve(rhs);
  }
  return system.ldlt().solve(rhs);
}

Matrix sandwich_dense(const SandwichProblem& prob) {
  prob.validate(false);
  require(prob.lambda > 0.0, "sandwich_dense requires lambda > 0");
  const auto n = static_cast<double>(prob.n());

  const SpectralDecomposition w_eig = sym_eig(prob.top * prob.top.transpose());
  const SpectralDecomposition z_eig =
      sym_eig(prob.features.transpose() * prob.features);
  const Matrix& U = w_eig.eigenvectors;  // D x D
  const Matrix& V = z_eig.eigenvectors;  // p x p

  Matrix core = U.transpose() * prob.top * prob.residuals.transpose() *
                prob.features * V;  // D x p
  // Denominators are >= n*lambda > 0 by construction.
  const Matrix denom = (w_eig.eigenvalues * z_eig.eigenvalues.transpose()).array() +
                       n * prob.lambda;
  core.array() /= denom.array();
  return U * core * V.transpose();
}

double sandwich_objective(const SandwichProblem& prob, const Matrix& A) {
  require(A.rows() == prob.D() && A.cols() == prob.p(),
          "sandwich_objective: A has wrong shape");
  const Matrix fit = prob.features * A.transpose() * prob.top;  // n x d
  const double data_term =
      (prob.residuals - fit).squaredNorm() / static_cast<double>(prob.n());
  return data_term + prob.lambda * A.squaredNorm();
}

}  // namespace rfrboost
