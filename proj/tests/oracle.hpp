#pragma once

// Test-only reference optimum for the LAD problem
//   min_x (1/m) sum_i |<a_i, x> - c_i|.
// For generic data an optimum interpolates d of the m rows, so enumerating
// every size-d row subset, solving the d x d interpolation system and
// scoring the candidates yields a true minimizer. Deliberately independent
// of the library solvers; guarded to m <= 12, d <= 3.

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace robustam::testing {

struct OracleSolution {
  Eigen::VectorXd x;
  double objective;
};

inline OracleSolution lad_bruteforce_oracle(const Eigen::MatrixXd& a,
                                            const Eigen::VectorXd& c) {
  const Eigen::Index m = a.rows();
  const Eigen::Index d = a.cols();
  if (m > 12 || d > 3) {
    throw std::invalid_argument("lad_bruteforce_oracle: instance too large");
  }
  if (c.size() != m || m < d) {
    throw std::invalid_argument("lad_bruteforce_oracle: bad shapes");
  }

  std::vector<Eigen::Index> subset(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) subset[static_cast<std::size_t>(i)] = i;

  bool found = false;
  OracleSolution best;
  best.objective = std::numeric_limits<double>::infinity();

  for (;;) {
    Eigen::MatrixXd sub_a(d, d);
    Eigen::VectorXd sub_c(d);
    for (Eigen::Index r = 0; r < d; ++r) {
      sub_a.row(r) = a.row(subset[static_cast<std::size_t>(r)]);
      sub_c[r] = c[subset[static_cast<std::size_t>(r)]];
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        sub_a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smax = svd.singularValues()[0];
    const double smin = svd.singularValues()[d - 1];
    if (smax > 0.0 && smin > 1e-10 * smax) {
      const Eigen::VectorXd x = svd.solve(sub_c);
      const double objective =
          (a * x - c).lpNorm<1>() / static_cast<double>(m);
      if (objective < best.objective) {
        best.x = x;
        best.objective = objective;
        found = true;
      }
    }

    // Next lexicographic combination.
    Eigen::Index pos = d - 1;
    while (pos >= 0 &&
           subset[static_cast<std::size_t>(pos)] == m - d + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (Eigen::Index i = pos + 1; i < d; ++i) {
      subset[static_cast<std::size_t>(i)] =
          subset[static_cast<std::size_t>(i - 1)] + 1;
    }
  }

  if (!found) {
    throw std::runtime_error(
        "lad_bruteforce_oracle: every row subset was singular");
  }
  return best;
}

}  // namespace robustam::testing
