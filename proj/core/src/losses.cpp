#include "rfrboost/losses.hpp"

#include <cmath>
#include <deque>
#include <functional>

#include "rfrboost/linalg.hpp"
#include "rfrboost/sandwich.hpp"

namespace rfrboost {

Eigen::Index Targets::n() const {
  return labels.size() > 0 ? labels.size() : values.rows();
}

Eigen::Index Targets::output_dim(LossKind kind) const {
  return kind == LossKind::Cce ? classes : values.cols();
}

Matrix one_hot(const IntVector& labels, int classes) {
  Matrix out = Matrix::Zero(labels.size(), classes);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels(i) < 0 || labels(i) >= classes) {
      throw InvalidInput("label out of range: " + std::to_string(labels(i)));
    }
    out(i, labels(i)) = 1.0;
  }
  return out;
}

namespace {

void check_targets(LossKind kind, const Matrix& logits, const Targets& y) {
  require(logits.rows() == y.n(), "loss: logit/target row count mismatch");
  if (kind == LossKind::Cce) {
    require(y.classes >= 2, "CCE requires at least two classes");
    require(logits.cols() == y.classes, "CCE: logit width != class count");
    for (Eigen::Index i = 0; i < y.labels.size(); ++i) {
      if (y.labels(i) < 0 || y.labels(i) >= y.classes) {
        throw InvalidInput("label out of range: " + std::to_string(y.labels(i)));
      }
    }
  } else {
    require(logits.cols() == y.values.cols(),
            "loss: logit width != target width");
  }
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix shifted = logits.colwise() - logits.rowwise().maxCoeff();
  Matrix expd = shifted.array().exp().matrix();
  return expd.array().colwise() / expd.rowwise().sum().array();
}

}  // namespace

double risk_from_logits(LossKind kind, const Matrix& logits, const Targets& y) {
  require_finite(logits, "loss logits");
  check_targets(kind, logits, y);
  const auto n = static_cast<double>(logits.rows());
  switch (kind) {
    case LossKind::Mse:
      return 0.5 * (logits - y.values).squaredNorm() / n;
    case LossKind::Bce: {
      // max(x,0) - x*y + log(1 + exp(-|x|)) per entry, stable for large |x|.
      const auto x = logits.array();
      const auto t = y.values.array();
      return (x.max(0.0) - x * t + (-x.abs()).exp().log1p()).sum() / n;
    }
    case LossKind::Cce: {
      const Matrix shifted = logits.colwise() - logits.rowwise().maxCoeff();
      const Vector lse = shifted.array().exp().rowwise().sum().log();
      double total = 0.0;
      for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        total += lse(i) - shifted(i, y.labels(i));
      }
      return total / n;
    }
  }
  return 0.0;
}

Matrix dloss_dlogits(LossKind kind, const Matrix& logits, const Targets& y) {
  check_targets(kind, logits, y);
  switch (kind) {
    case LossKind::Mse:
      return logits - y.values;
    case LossKind::Bce:
      return (1.0 / (1.0 + (-logits.array()).exp())).matrix() - y.values;
    case LossKind::Cce:
      return softmax_rows(logits) - one_hot(y.labels, y.classes);
  }
  return {};
}

double empirical_risk(LossKind kind, const Matrix& W, const Matrix& Phi,
                      const Targets& y) {
  return risk_from_logits(kind, Phi * W, y);
}

Matrix functional_gradient(LossKind kind, const Matrix& W, const Matrix& Phi,
                           const Targets& y) {
  const Matrix dl = dloss_dlogits(kind, Phi * W, y);  // n x d
  return dl * W.transpose();                          // n x D
}

Matrix fit_gradient_direction(const Matrix& F, const Matrix& G, double lambda) {
  require_finite(G, "functional gradient");
  require(F.rows() == G.rows(), "fit_gradient_direction: row count mismatch");
  const double gnorm = G.norm();
  if (gnorm == 0.0) {
    throw ZeroGradient("functional gradient is zero");
  }
  const double n = static_cast<double>(G.rows());
  const Matrix target = (-std::sqrt(n) / gnorm) * G;
  return ridge_solve(F, target, lambda).transpose();  // D x p
}

namespace {

// First and second derivatives of alpha -> risk(logits0 + alpha * dlogits).
struct DirectionalDerivs {
  double d1 = 0.0;
  double d2 = 0.0;
};

DirectionalDerivs directional_derivs(LossKind kind, const Matrix& logits0,
                                     const Matrix& dlogits, const Targets& y,
                                     double alpha) {
  const Matrix logits = logits0 + alpha * dlogits;
  const auto n = static_cast<double>(logits.rows());
  DirectionalDerivs out;
  out.d1 = dloss_dlogits(kind, logits, y).cwiseProduct(dlogits).sum() / n;
  switch (kind) {
    case LossKind::Mse:
      out.d2 = dlogits.squaredNorm() / n;
      break;
    case LossKind::Bce: {
      const Matrix sig = (1.0 / (1.0 + (-logits.array()).exp())).matrix();
      out.d2 = (sig.array() * (1.0 - sig.array()) * dlogits.array().square())
                   .sum() / n;
      break;
    }
    case LossKind::Cce: {
      const Matrix probs = softmax_rows(logits);
      // Row-wise u^T (diag(s) - s s^T) u.
      const Vector su = probs.cwiseProduct(dlogits).rowwise().sum();
      const Vector su2 = probs.cwiseProduct(dlogits.cwiseAbs2()).rowwise().sum();
      out.d2 = (su2.array() - su.array().square()).sum() / n;
      break;
    }
  }
  return out;
}

constexpr double kLineSearchAlphaMax = 1e8;

}  // namespace

double line_search_logits(LossKind kind, const Matrix& logits0,
                          const Matrix& dlogits, const Targets& y) {
  require(logits0.rows() == dlogits.rows() && logits0.cols() == dlogits.cols(),
          "line_search: direction shape mismatch");

  if (kind == LossKind::Mse) {
    // Exact 1-D least squares step on the residuals, clamped to alpha >= 0.
    const double denom = dlogits.squaredNorm();
    if (denom == 0.0) return 0.0;
    const double num = (y.values - logits0).cwiseProduct(dlogits).sum();
    return std::max(0.0, num / denom);
  }

  const double d1_at_zero = directional_derivs(kind, logits0, dlogits, y, 0.0).d1;
  if (d1_at_zero >= 0.0) return 0.0;

  // Bracket the root of the (nondecreasing) derivative, then Newton with a
  // bisection safeguard.
  double lo = 0.0;
  double hi = 1.0;
  while (hi < kLineSearchAlphaMax &&
         directional_derivs(kind, logits0, dlogits, y, hi).d1 < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  hi = std::min(hi, kLineSearchAlphaMax);
  if (directional_derivs(kind, logits0, dlogits, y, hi).d1 < 0.0) {
    return hi;  // capped at alpha_max
  }

  double alpha = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const DirectionalDerivs d = directional_derivs(kind, logits0, dlogits, y, alpha);
    if (d.d1 > 0.0) {
      hi = alpha;
    } else {
      lo = alpha;
    }
    double next;
    if (d.d2 > 1e-14) {
      next = alpha - d.d1 / d.d2;
      if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
    } else {
      next = 0.5 * (lo + hi);
    }
    if (std::abs(next - alpha) <= 1e-10) {
      return next;
    }
    alpha = next;
  }
  return alpha;
}

double line_search(LossKind kind, const Matrix& W, const Matrix& Phi,
                   const Matrix& direction, const Targets& y) {
  require(direction.rows() == Phi.rows() && direction.cols() == Phi.cols(),
          "line_search: direction shape mismatch");
  return line_search_logits(kind, Phi * W, direction * W, y);
}

namespace {

// Minimal L-BFGS (m = 10) with Armijo backtracking. The objective callback
// fills the gradient and returns the function value.
using Objective = std::function<double(const Vector&, Vector&)>;

Vector lbfgs_minimize(const Objective& objective, Vector x, double grad_tol_scale,
                      int max_iters, std::vector<double>* trace) {
  const int memory = 10;
  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;

  Vector grad(x.size());
  double f = objective(x, grad);
  if (trace) trace->push_back(f);

  for (int iter = 0; iter < max_iters; ++iter) {
    if (grad.norm() <= grad_tol_scale * (1.0 + x.norm())) break;

    // Two-loop recursion.
    Vector q = grad;
    std::vector<double> alpha_coef(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha_coef[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha_coef[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha_coef[i] - beta) * s_hist[i];
    }
    Vector direction = -q;
    double dir_deriv = grad.dot(direction);
    if (dir_deriv >= 0.0) {
      direction = -grad;
      dir_deriv = -grad.squaredNorm();
    }

    // Armijo backtracking.
    double step = 1.0;
    Vector x_new;
    Vector grad_new(x.size());
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < 50; ++bt) {
      x_new = x + step * direction;
      f_new = objective(x_new, grad_new);
      if (f_new <= f + 1e-4 * step * dir_deriv) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Vector s = x_new - x;
    const Vector dy = grad_new - grad;
    const double sy = s.dot(dy);
    if (sy > 1e-12) {
      s_hist.push_back(s);
      y_hist.push_back(dy);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = x_new;
    grad = grad_new;
    f = f_new;
    if (trace) trace->push_back(f);
  }
  return x;
}

}  // namespace

TopFitResult fit_top_linear_traced(LossKind kind, const Matrix& Phi,
                                   const Targets& y, double lambda,
                                   const Matrix* warm_start) {
  require_finite(Phi, "fit_top_linear representation");
  const Eigen::Index D = Phi.cols();
  const Eigen::Index d = y.output_dim(kind);
  require(Phi.rows() == y.n(), "fit_top_linear: row count mismatch");

  TopFitResult result;
  if (kind == LossKind::Mse) {
    result.W = ridge_solve(Phi, y.values, lambda);
    result.objective_trace.push_back(
        risk_from_logits(kind, Phi * result.W, y) +
        lambda * result.W.squaredNorm());
    return result;
  }

  const auto n = static_cast<double>(Phi.rows());
  const Objective objective = [&](const Vector& x, Vector& grad) {
    const Eigen::Map<const Matrix> W(x.data(), D, d);
    const Matrix logits = Phi * W;
    const Matrix dl = dloss_dlogits(kind, logits, y);
    const Matrix gW = Phi.transpose() * dl / n + 2.0 * lambda * W;
    grad = Eigen::Map<const Vector>(gW.data(), gW.size());
    return risk_from_logits(kind, logits, y) + lambda * W.squaredNorm();
  };

  Vector x0 = Vector::Zero(D * d);
  if (warm_start != nullptr) {
    require(warm_start->rows() == D && warm_start->cols() == d,
            "fit_top_linear: warm start shape mismatch");
    x0 = Eigen::Map<const Vector>(warm_start->data(), warm_start->size());
  }
  const Vector x =
      lbfgs_minimize(objective, x0, 1e-7, 500, &result.objective_trace);
  result.W = Eigen::Map<const Matrix>(x.data(), D, d);
  return result;
}

Matrix fit_top_linear(LossKind kind, const Matrix& Phi, const Targets& y,
                      double lambda, const Matrix* warm_start) {
  return fit_top_linear_traced(kind, Phi, y, lambda, warm_start).W;
}

Matrix head_logits(const LinearHead& head, const Matrix& Phi) {
  return (Phi * head.W).rowwise() + head.b;
}

LinearHead fit_affine_head(LossKind kind, const Matrix& Phi, const Targets& y,
                           double lambda, const LinearHead* warm) {
  const Eigen::Index D = Phi.cols();
  const Eigen::Index d = y.output_dim(kind);
  const auto n = static_cast<double>(Phi.rows());

  if (kind == LossKind::Mse) {
    // Augmented normal equations with the intercept row unpenalized.
    Matrix F(Phi.rows(), D + 1);
    F.leftCols(D) = Phi;
    F.col(D).setOnes();
    Matrix normal = F.transpose() * F;
    normal.diagonal().head(D).array() += n * lambda;
    const Matrix rhs = F.transpose() * y.values;
    Matrix M;
    if (lambda == 0.0) {
      Eigen::FullPivLU<Matrix> lu(normal);
      if (!lu.isInvertible()) {
        throw SingularSystem("fit_affine_head: singular system at lambda = 0");
      }
      M = lu.solve(rhs);
    } else {
      M = normal.ldlt().solve(rhs);
    }
    return LinearHead{M.topRows(D), M.row(D)};
  }

  const Objective objective = [&](const Vector& x, Vector& grad) {
    const Eigen::Map<const Matrix> W(x.data(), D, d);
    const Eigen::Map<const RowVector> b(x.data() + D * d, d);
    const Matrix logits = (Phi * W).rowwise() + b;
    const Matrix dl = dloss_dlogits(kind, logits, y);
    Matrix gW = Phi.transpose() * dl / n + 2.0 * lambda * W;
    RowVector gb = dl.colwise().sum() / n;
    grad.resize(x.size());
    grad.head(D * d) = Eigen::Map<const Vector>(gW.data(), gW.size());
    grad.tail(d) = gb.transpose();
    return risk_from_logits(kind, logits, y) + lambda * W.squaredNorm();
  };

  Vector x0 = Vector::Zero(D * d + d);
  if (warm != nullptr && warm->W.rows() == D && warm->W.cols() == d) {
    x0.head(D * d) = Eigen::Map<const Vector>(warm->W.data(), warm->W.size());
    x0.tail(d) = warm->b.transpose();
  }
  const Vector x = lbfgs_minimize(objective, x0, 1e-7, 500, nullptr);
  LinearHead head;
  head.W = Eigen::Map<const Matrix>(x.data(), D, d);
  head.b = x.tail(d).transpose();
  return head;
}

}  // namespace rfrboost
