#include <doctest.h>

#include "oracles.hpp"
#include "rfrboost/sandwich.hpp"

using namespace rfrboost;
using testing::fd_sandwich_gradient;
using testing::golden_section;
using testing::kron_sandwich_oracle;
using testing::random_matrix;

namespace {

Matrix embed(SandwichStructure structure, const SandwichProblem& prob,
             double scalar, const Vector& diag, const Matrix& dense) {
  switch (structure) {
    case SandwichStructure::Scalar:
      return scalar * Matrix::Identity(prob.D(), prob.D());
    case SandwichStructure::Diagonal:
      return Matrix(diag.asDiagonal());
    case SandwichStructure::Dense:
      return dense;
  }
  return dense;
}

SandwichProblem random_problem(Rng& rng, int n, int D, int p, int d,
                               double lambda) {
  return SandwichProblem{random_matrix(rng, n, d), random_matrix(rng, D, d),
                         random_matrix(rng, n, p), lambda};
}

}  // namespace

TEST_CASE("scalar: one-dimensional projection") {
  Matrix R(1, 1), W(1, 1), Z(1, 1);
  R << 2.0;
  W << 1.0;
  Z << 1.0;
  CHECK(sandwich_scalar({R, W, Z, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("scalar: residuals equal projected features") {
  Rng rng(21);
  const Matrix W = random_matrix(rng, 3, 2);
  const Matrix Z = random_matrix(rng, 6, 3);
  const Matrix R = Z * W;
  CHECK(sandwich_scalar({R, W, Z, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scalar: matches golden-section minimization") {
  Rng rng(22);
  const SandwichProblem prob = random_problem(rng, 6, 3, 3, 2, 0.1);
  const double a = sandwich_scalar(prob);
  // The scalar structure penalizes the scalar itself (lambda a^2), not the
  // Frobenius norm of the embedded a I.
  SandwichProblem unpen = prob;
  unpen.lambda = 0.0;
  const double oracle = golden_section(
      [&](double s) {
        return sandwich_objective(
                   unpen, s * Matrix::Identity(prob.D(), prob.D())) +
               prob.lambda * s * s;
      },
      -10.0, 10.0);
  CHECK(a == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("scalar: degenerate ZW at lambda zero") {
  const Matrix R = Matrix::Ones(4, 2);
  const Matrix W = Matrix::Zero(3, 2);
  const Matrix Z = Matrix::Ones(4, 3);
  CHECK_THROWS_AS(sandwich_scalar({R, W, Z, 0.0}), DegenerateProblem);
}

TEST_CASE("diag: zero residuals give zero solution") {
  Rng rng(23);
  const Matrix W = random_matrix(rng, 3, 2);
  const Matrix Z = random_matrix(rng, 8, 3);
  const Vector a = sandwich_diag({Matrix::Zero(8, 2), W, Z, 0.05});
  CHECK(a.norm() < 1e-12);
}

TEST_CASE("diag: D=1 equals scalar") {
  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const SandwichProblem prob = random_problem(rng, 7, 1, 1, 3, 0.05);
    CHECK(std::abs(sandwich_diag(prob)(0) - sandwich_scalar(prob)) < 1e-10);
  }
}

TEST_CASE("diag: finite-difference stationarity") {
  Rng rng(25);
  const SandwichProblem prob = random_problem(rng, 8, 3, 3, 2, 0.05);
  const Vector a = sandwich_diag(prob);
  // restrict the gradient to the diagonal coordinates
  const Matrix grad = fd_sandwich_gradient(prob, Matrix(a.asDiagonal()));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(grad(i, i)) <= 1e-6);
}

TEST_CASE("diag: singular system at lambda zero") {
  const Matrix R = Matrix::Ones(4, 2);
  const Matrix W = Matrix::Zero(3, 2);
  const Matrix Z = Matrix::Ones(4, 3);
  CHECK_THROWS_AS(sandwich_diag({R, W, Z, 0.0}), SingularSystem);
}

TEST_CASE("dense: zero residuals give zero solution") {
  Rng rng(26);
  const Matrix W = random_matrix(rng, 3, 4);
  const Matrix Z = random_matrix(rng, 8, 2);
  const Matrix A = sandwich_dense({Matrix::Zero(8, 4), W, Z, 0.1});
  CHECK(A.norm() < 1e-12);
}

TEST_CASE("dense: scalar formula with n lambda term") {
  Matrix R(1, 1), W(1, 1), Z(1, 1);
  R << 2.0;
  W << 1.0;
  Z << 1.0;
  const Matrix A = sandwich_dense({R, W, Z, 0.5});
  CHECK(A(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("dense: agrees with the Kronecker oracle") {
  Rng rng(27);
  const SandwichProblem prob = random_problem(rng, 8, 3, 2, 4, 0.1);
  const Matrix A = sandwich_dense(prob);
  const Matrix oracle = kron_sandwich_oracle(prob.residuals, prob.top,
                                             prob.features, prob.lambda);
  CHECK((A - oracle).norm() <= 1e-6 * (1.0 + oracle.norm()));
}

TEST_CASE("dense: rejects non-positive lambda") {
  Rng rng(28);
  const SandwichProblem prob = random_problem(rng, 8, 3, 2, 4, 0.0);
  CHECK_THROWS_AS(sandwich_dense(prob), InvalidInput);
}

TEST_CASE("dense: stationarity identity") {
  Rng rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform_below(8));
    const int D = 1 + static_cast<int>(rng.uniform_below(4));
    const int p = 1 + static_cast<int>(rng.uniform_below(4));
    const int d = 1 + static_cast<int>(rng.uniform_below(3));
    const SandwichProblem prob = random_problem(rng, n, D, p, d, 0.1);
    const Matrix A = sandwich_dense(prob);
    const Matrix lhs = prob.top * prob.residuals.transpose() * prob.features;
    const Matrix rhs = prob.top * prob.top.transpose() * A *
                           prob.features.transpose() * prob.features +
                       prob.lambda * static_cast<double>(n) * A;
    CHECK((lhs - rhs).norm() <= 1e-8 * (1.0 + lhs.norm()));
  }
}

TEST_CASE("nesting optimality on square instances") {
  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    const SandwichProblem prob = random_problem(rng, 10, 3, 3, 2, 0.05);
    const double s = sandwich_scalar(prob);
    const Vector a = sandwich_diag(prob);
    const Matrix A = sandwich_dense(prob);
    const double j_dense = sandwich_objective(prob, A);
    const double j_diag = sandwich_objective(
        prob, embed(SandwichStructure::Diagonal, prob, s, a, A));
    const double j_scalar = sandwich_objective(
        prob, embed(SandwichStructure::Scalar, prob, s, a, A));
    CHECK(j_dense <= j_diag + 1e-10);
    CHECK(j_diag <= j_scalar + 1e-10);
  }
}

TEST_CASE("all three closed forms are linear in the residuals at lambda zero") {
  Rng rng(31);
  // d >= D keeps W W^T invertible so the lambda = 0 oracle system is regular.
  const int n = 10, D = 3, p = 3, d = 3;
  const Matrix R = random_matrix(rng, n, d);
  const Matrix W = random_matrix(rng, D, d);
  const Matrix Z = random_matrix(rng, n, p);
  const double c = 3.7;
  // scalar and diagonal support lambda = 0 directly
  CHECK(sandwich_scalar({c * R, W, Z, 0.0}) ==
        doctest::Approx(c * sandwich_scalar({R, W, Z, 0.0})).epsilon(1e-10));
  const Vector a1 = sandwich_diag({R, W, Z, 0.0});
  const Vector a2 = sandwich_diag({c * R, W, Z, 0.0});
  CHECK((a2 - c * a1).norm() <= 1e-8 * (1.0 + a1.norm()));
  // dense checked through the lambda = 0 oracle path
  const Matrix A1 = kron_sandwich_oracle(R, W, Z, 0.0);
  const Matrix A2 = kron_sandwich_oracle(c * R, W, Z, 0.0);
  CHECK((A2 - c * A1).norm() <= 1e-8 * (1.0 + A1.norm()));
}

TEST_CASE("validate rejects mismatched and non-square inputs") {
  Rng rng(32);
  const SandwichProblem bad = random_problem(rng, 6, 3, 2, 2, 0.1);
  CHECK_THROWS_AS(bad.validate(/*square_required=*/true), InvalidInput);
  SandwichProblem mismatched = random_problem(rng, 6, 3, 3, 2, 0.1);
  mismatched.features = random_matrix(rng, 5, 3);  // wrong row count
  CHECK_THROWS_AS(mismatched.validate(false), InvalidInput);
}
