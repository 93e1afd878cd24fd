#include "rfrboost/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace rfrboost {

SpectralDecomposition sym_eig(const Matrix& S) {
  require_finite(S, "sym_eig input");
  require(S.rows() == S.cols(), "sym_eig requires a square matrix");
  const Matrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw SingularSystem("symmetric eigendecomposition failed to converge");
  }
  return SpectralDecomposition{solver.eigenvectors(), solver.eigenvalues()};
}

Matrix ridge_solve(const Matrix& F, const Matrix& T, double lambda) {
  require_finite(F, "ridge_solve features");
  require_finite(T, "ridge_solve targets");
  require(F.rows() == T.rows(), "ridge_solve: row counts differ");
  require(F.rows() >= 1, "ridge_solve: empty design");
  require(lambda >= 0.0, "ridge_solve: negative lambda");

  const auto n = static_cast<double>(F.rows());
  Matrix normal = F.transpose() * F;
  normal.diagonal().array() += n * lambda;
  const Matrix rhs = F.transpose() * T;

  if (lambda == 0.0) {
    Eigen::FullPivLU<Matrix> lu(normal);
    if (!lu.isInvertible()) {
      throw SingularSystem("ridge_solve: singular normal equations at lambda = 0");
    }
    return lu.solve(rhs);
  }
  return normal.ldlt().solve(rhs);
}

}  // namespace rfrboost
