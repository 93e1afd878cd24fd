#pragma once

#include <Eigen/Dense>
#include <string>

#include "rfrboost/errors.hpp"

namespace rfrboost {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using IntVector = Eigen::VectorXi;

inline void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(name) + " contains non-finite entries");
  }
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

}  // namespace rfrboost
