#include "robustam/theory.hpp"

#include "robustam/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace robustam {

RateConstants rate_constants(double eta) {
  if (!(eta >= 0.0 && eta <= 0.25)) {
    throw std::invalid_argument(
        "rate_constants: eta must lie in [0, 1/4] (C_eta positivity is only "
        "established there)");
  }
  const double pi = std::numbers::pi;
  const double sqrt_2_over_pi = std::sqrt(2.0 / pi);
  const double c0 =
      (4.0 / (25.0 * pi)) *
          (sqrt_2_over_pi + std::sqrt(2.0 * std::log(25.0 * std::numbers::e *
                                                     pi / 4.0))) +
      1.0 / (625.0 * std::sqrt(pi));
  const double c_eta = (1.0 - 2.0 * eta) * sqrt_2_over_pi - c0 -
                       (1.0 / 250.0) * (1.0 + std::sqrt(eta));
  const double nu = c0 / c_eta;
  const double lambda = 1.0 / (c_eta * (1.0 - nu));
  return {eta, c0, c_eta, nu, lambda};
}

double basin_radius(double norm_xstar) {
  if (norm_xstar < 0.0) {
    throw std::invalid_argument("basin_radius: norm must be nonnegative");
  }
  return std::sin(2.0 / 25.0) * norm_xstar;
}

double wedge_probability_mc(const VectorXd& x, const VectorXd& z,
                            int n_samples, std::uint64_t seed) {
  if (x.size() != z.size()) {
    throw DimensionError("wedge_probability_mc: length mismatch");
  }
  if (x.norm() == 0.0 || z.norm() == 0.0) {
    throw std::invalid_argument("wedge_probability_mc: zero vector");
  }
  if (n_samples < 1) {
    throw std::invalid_argument("wedge_probability_mc: need samples");
  }
  RngStream rng = derive_stream(seed, "wedge_mc");
  const Index d = x.size();
  VectorXd g(d);
  long hits = 0;
  for (int s = 0; s < n_samples; ++s) {
    for (Index i = 0; i < d; ++i) g[i] = rng.normal();
    if (sign_pm(g.dot(x)) != sign_pm(g.dot(z))) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n_samples);
}

RateFit certify_linear_rate(const IterateTrace& trace, int window,
                            double dist_floor) {
  if (window < 2) {
    throw std::invalid_argument("certify_linear_rate: window must be >= 2");
  }
  std::vector<double> ks, logs;
  for (const TraceRow& row : trace.rows) {
    if (std::isfinite(row.dist_to_truth) && row.dist_to_truth > dist_floor) {
      ks.push_back(static_cast<double>(row.k));
      logs.push_back(std::log(row.dist_to_truth));
      if (static_cast<int>(ks.size()) == window) break;
    }
  }
  if (static_cast<int>(ks.size()) < window) {
    throw std::invalid_argument(
        "certify_linear_rate: trace has fewer than `window` rows above the "
        "dist floor");
  }
  const double n = static_cast<double>(window);
  double k_mean = 0.0, l_mean = 0.0;
  for (int i = 0; i < window; ++i) {
    k_mean += ks[i];
    l_mean += logs[i];
  }
  k_mean /= n;
  l_mean /= n;
  double skk = 0.0, skl = 0.0, sll = 0.0;
  for (int i = 0; i < window; ++i) {
    const double dk = ks[i] - k_mean;
    const double dl = logs[i] - l_mean;
    skk += dk * dk;
    skl += dk * dl;
    sll += dl * dl;
  }
  const double slope = skl / skk;
  double r2 = 1.0;
  // Rounding dust on an exactly constant window must not count as variance.
  const double sll_floor = 1e-24 * n * (1.0 + l_mean * l_mean);
  if (sll > sll_floor) {
    double ss_res = 0.0;
    for (int i = 0; i < window; ++i) {
      const double fit = l_mean + slope * (ks[i] - k_mean);
      const double r = logs[i] - fit;
      ss_res += r * r;
    }
    r2 = 1.0 - ss_res / sll;
  }
  return {std::exp(slope), r2};
}

}  // namespace robustam
