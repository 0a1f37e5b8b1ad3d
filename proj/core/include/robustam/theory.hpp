#pragma once

#include "robustam/common.hpp"
#include "robustam/robust_am.hpp"

#include <cstdint>

namespace robustam {

/// Contraction-rate constants of the local convergence guarantee as a
/// function of the outlier fraction eta in [0, 1/4]:
///   c0       = (4/(25 pi)) (sqrt(2/pi) + sqrt(2 ln(25 e pi / 4)))
///              + 1/(625 sqrt(pi))
///   C_eta    = (1 - 2 eta) sqrt(2/pi) - c0 - (1/250)(1 + sqrt(eta))
///   nu_eta   = c0 / C_eta                  (per-step contraction factor)
///   lambda_eta = 1 / (C_eta (1 - nu_eta))  (inexactness amplification)
/// lambda_eta follows from summing the geometric recursion
/// e_j <= nu e_{j-1} + eps/C_eta to its fixed point eps/(C_eta(1-nu)).
/// Logs are natural.
struct RateConstants {
  double eta;
  double c0;
  double C_eta;
  double nu_eta;
  double lambda_eta;
};

RateConstants rate_constants(double eta);

/// Radius of the guaranteed convergence basin: sin(2/25) * ||x*||.
double basin_radius(double norm_xstar);

/// Monte-Carlo estimate of P(sign<g,x> != sign<g,z>) for g standard normal;
/// the exact value is angle(x,z)/pi in every dimension.
double wedge_probability_mc(const VectorXd& x, const VectorXd& z,
                            int n_samples, std::uint64_t seed);

struct RateFit {
  double rate;       // e^{slope} of the log-dist fit, the empirical contraction
  double r_squared;  // goodness of fit (1 for an exactly constant window)
};

/// Least-squares fit of log dist(x_k) against k over the first `window`
/// trace rows whose dist exceeds dist_floor. Throws when fewer than
/// `window` rows qualify.
RateFit certify_linear_rate(const IterateTrace& trace, int window,
                            double dist_floor = 1e-14);

}  // namespace robustam
