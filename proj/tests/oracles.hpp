#pragma once

// Independent reference implementations used only by tests: a brute-force
// Kronecker-system solver for the dense sandwich problem, finite-difference
// gradients, and a golden-section 1-D minimizer.

#include <cmath>
#include <functional>

#include "rfrboost/losses.hpp"
#include "rfrboost/rng.hpp"
#include "rfrboost/sandwich.hpp"

namespace rfrboost::testing {

// Solves min_A (1/n)||R - Z A^T W||_F^2 + lambda ||A||_F^2 by forming the
// (Dp) x (Dp) normal system [(Z^T Z) (x) (W W^T) + lambda n I] vec(A) =
// vec(W R^T Z) explicitly. O((Dp)^3); intended for D*p <= 256.
inline Matrix kron_sandwich_oracle(const Matrix& R, const Matrix& W,
                                   const Matrix& Z, double lambda) {
  require(R.rows() == Z.rows(), "kron oracle: R/Z row mismatch");
  require(R.cols() == W.cols(), "kron oracle: R/W column mismatch");
  const Eigen::Index n = R.rows();
  const Eigen::Index d = R.cols();
  const Eigen::Index D = W.rows();
  const Eigen::Index p = Z.cols();
  require(D * p <= 256, "kron oracle: D*p too large");
  (void)d;

  const Matrix WWt = W * W.transpose();   // D x D
  const Matrix ZtZ = Z.transpose() * Z;   // p x p
  const Matrix rhs_mat = W * R.transpose() * Z;  // D x p

  const Eigen::Index m = D * p;
  Matrix system = Matrix::Zero(m, m);
  for (Eigen::Index pj = 0; pj < p; ++pj) {
    for (Eigen::Index pi = 0; pi < p; ++pi) {
      system.block(pj * D, pi * D, D, D) = ZtZ(pj, pi) * WWt;
    }
  }
  system.diagonal().array() += lambda * static_cast<double>(n);

  Vector rhs(m);
  for (Eigen::Index j = 0; j < p; ++j) rhs.segment(j * D, D) = rhs_mat.col(j);

  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) {
    throw SingularSystem("kron oracle: singular normal system");
  }
  const Vector a = lu.solve(rhs);

  Matrix A(D, p);
  for (Eigen::Index j = 0; j < p; ++j) A.col(j) = a.segment(j * D, D);
  return A;
}

// Central-difference gradient of the sandwich objective at A.
inline Matrix fd_sandwich_gradient(const SandwichProblem& prob, const Matrix& A,
                                   double h = 1e-6) {
  Matrix grad(A.rows(), A.cols());
  Matrix probe = A;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      probe(i, j) = A(i, j) + h;
      const double up = sandwich_objective(prob, probe);
      probe(i, j) = A(i, j) - h;
      const double down = sandwich_objective(prob, probe);
      probe(i, j) = A(i, j);
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

// Central-difference gradient of the empirical risk w.r.t. the representation.
inline Matrix fd_risk_gradient(LossKind kind, const Matrix& W, const Matrix& Phi,
                               const Targets& y, double h = 1e-6) {
  Matrix grad(Phi.rows(), Phi.cols());
  Matrix probe = Phi;
  for (Eigen::Index i = 0; i < Phi.rows(); ++i) {
    for (Eigen::Index j = 0; j < Phi.cols(); ++j) {
      probe(i, j) = Phi(i, j) + h;
      const double up = empirical_risk(kind, W, probe, y);
      probe(i, j) = Phi(i, j) - h;
      const double down = empirical_risk(kind, W, probe, y);
      probe(i, j) = Phi(i, j);
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

// Golden-section search for the minimizer of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo,
                             double hi, double tol = 1e-10) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

}  // namespace rfrboost::testing
