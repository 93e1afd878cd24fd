#pragma once

#include "rfrboost/matrix.hpp"

namespace rfrboost {

// Eigendecomposition of a symmetric matrix, eigenvalues in ascending order.
// Satisfies U diag(lambda) U^T = S and U^T U = I to 1e-10.
struct SpectralDecomposition {
  Matrix eigenvectors;  // D x D, orthogonal
  Vector eigenvalues;   // length D, ascending
};

// S is symmetrized internally via (S + S^T)/2.
SpectralDecomposition sym_eig(const Matrix& S);

// argmin_M (1/n)||T - F M||_F^2 + lambda ||M||_F^2,
// i.e. solves (F^T F + n lambda I) M = F^T T.
// Throws SingularSystem when lambda = 0 and F^T F is singular.
Matrix ridge_solve(const Matrix& F, const Matrix& T, double lambda);

}  // namespace rfrboost
