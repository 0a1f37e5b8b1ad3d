#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace robustam {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Shapes of inputs don't match the operator or each other.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A factorization found the matrix (numerically) rank deficient.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An iterative solver produced a non-finite iterate.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be read, written, or parsed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Global sign convention: sign(0) = +1. All solvers and the outer loop use
// this one, so sign patterns are reproducible even when a projection is
// exactly zero.
inline double sign_pm(double v) { return v >= 0.0 ? 1.0 : -1.0; }

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

inline Index next_power_of_two(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace robustam
