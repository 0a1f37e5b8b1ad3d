#include "robustam/theory.hpp"

#include "robustam/robust_am.hpp"
#include "robustam/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace robustam;

namespace {

// Orthonormal pair spanning a random 2-plane, for wedge tests at an exact
// angle.
std::pair<VectorXd, VectorXd> random_plane(Index d, std::uint64_t seed) {
  RngStream rng(seed);
  const VectorXd u = rng.unit_vector(d);
  VectorXd w = rng.normal_vector(d);
  w -= w.dot(u) * u;
  return {u, w / w.norm()};
}

}  // namespace

TEST_SUITE_BEGIN("theory");

TEST_CASE("rate constants at eta = 0") {
  const auto rc = rate_constants(0.0);
  CHECK(std::abs(rc.nu_eta - 0.304) < 1e-3);
  CHECK(rc.C_eta > 0.0);
  CHECK(rc.lambda_eta > 0.0);
  CHECK(rc.nu_eta == doctest::Approx(rc.c0 / rc.C_eta).epsilon(1e-15));
}

TEST_CASE("rate constants at the eta = 1/4 boundary stay below 9/10") {
  const auto rc = rate_constants(0.25);
  CHECK(rc.nu_eta < 0.9);
  CHECK(rc.nu_eta > 0.0);
  CHECK(rc.C_eta > 0.0);
}

TEST_CASE("eta outside [0, 1/4] is rejected") {
  CHECK_THROWS_AS(rate_constants(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(rate_constants(0.26), std::invalid_argument);
}

TEST_CASE("nu is strictly increasing on the coarse eta grid") {
  double prev = -1.0;
  for (double eta = 0.0; eta <= 0.2501; eta += 0.05) {
    const double nu = rate_constants(eta).nu_eta;
    CHECK(nu > prev);
    prev = nu;
  }
}

TEST_CASE("constants behave across a 1000-point grid") {
  double prev_nu = -1.0;
  double prev_lambda = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double eta = 0.25 * static_cast<double>(i) / 999.0;
    const auto rc = rate_constants(eta);
    CHECK(rc.C_eta > 0.0);
    CHECK(rc.nu_eta > 0.0);
    CHECK(rc.nu_eta < 1.0);
    CHECK(rc.nu_eta > prev_nu);       // forward differences positive
    CHECK(rc.lambda_eta > prev_lambda);
    prev_nu = rc.nu_eta;
    prev_lambda = rc.lambda_eta;
  }
}

TEST_CASE("basin radius") {
  CHECK(basin_radius(0.0) == 0.0);
  CHECK(basin_radius(1.0) == doctest::Approx(std::sin(0.08)));
  CHECK(basin_radius(2.5) == doctest::Approx(2.5 * std::sin(0.08)));
  CHECK_THROWS_AS(basin_radius(-1.0), std::invalid_argument);
}

TEST_CASE("wedge probability: degenerate pairs") {
  RngStream rng(1);
  const VectorXd x = rng.normal_vector(6);
  CHECK(wedge_probability_mc(x, x, 2000, 5) == 0.0);
  CHECK(wedge_probability_mc(x, -x, 2000, 5) == 1.0);
  CHECK_THROWS_AS(wedge_probability_mc(x, VectorXd::Zero(6), 10, 5),
                  std::invalid_argument);
}

TEST_CASE("wedge probability equals angle/pi in every dimension") {
  const int n = 20000;
  for (const double theta :
       {0.08, std::numbers::pi / 6.0, std::numbers::pi / 4.0}) {
    for (const Index d : {Index{2}, Index{10}, Index{100}}) {
      auto [u, w] = random_plane(d, 7 + d);
      const VectorXd z = std::cos(theta) * u + std::sin(theta) * w;
      const double p = theta / std::numbers::pi;
      const double sigma = std::sqrt(p * (1.0 - p) / n);
      const double est = wedge_probability_mc(u, z, n, 11 + d);
      CHECK(std::abs(est - p) <= 3.0 * sigma);
      CHECK(est <= p + 3.0 * sigma);
    }
  }
}

TEST_CASE("rate certification on an exact geometric trace") {
  IterateTrace trace;
  for (int k = 0; k < 20; ++k) {
    trace.rows.push_back({k, std::pow(0.5, k), 0.0, 0, 0.0});
  }
  const auto fit = certify_linear_rate(trace, 15);
  CHECK(std::abs(fit.rate - 0.5) <= 1e-6);
  CHECK(fit.r_squared >= 0.999999);
}

TEST_CASE("rate certification on a constant trace gives rate one") {
  IterateTrace trace;
  for (int k = 0; k < 12; ++k) {
    trace.rows.push_back({k, 0.125, 0.0, 0, 0.0});
  }
  const auto fit = certify_linear_rate(trace, 10);
  CHECK(fit.rate == doctest::Approx(1.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("rate certification on an end-to-end run") {
  // d = 100, m = 1500, eta = 0.1 from a spectral start: the corruption is
  // far below the LAD exact-recovery threshold at this m/d, so recovery
  // takes two outer steps and exactly two rows sit above the floor. The
  // two-point window certifies the (dramatic) per-step contraction.
  auto op = gaussian_ensemble(100, 1500, derive_seed(8000, "op"));
  RngStream rng = derive_stream(8000, "signal");
  const VectorXd x_star = rng.normal_vector(100);
  OutlierSpec ospec;
  ospec.fraction = 0.1;
  ospec.value_model = OutlierValueModel::zero;
  auto inst =
      synthesize_instance(std::move(op), x_star, ospec, derive_seed(8000, "inst"));
  const auto init = spectral_init(inst);
  RobustAmConfig cfg;
  cfg.dist_tol = 1e-6;
  cfg.max_outer = 40;
  cfg.record_trace = true;
  cfg.auto_epsilon_schedule = true;
  cfg.admm.max_iters = 2500;
  const auto res = robust_am(inst, init.x0, cfg);
  const auto fit = certify_linear_rate(*res.trace, 2, 1e-5);
  CHECK(fit.rate < 1.0);
  CHECK(fit.r_squared >= 0.9);
}

TEST_CASE("rate certification skips floored rows and rejects short traces") {
  IterateTrace trace;
  for (int k = 0; k < 6; ++k) {
    trace.rows.push_back({k, std::pow(0.25, k), 0.0, 0, 0.0});
  }
  for (int k = 6; k < 30; ++k) {
    trace.rows.push_back({k, 1e-13, 0.0, 0, 0.0});  // solver floor
  }
  const auto fit = certify_linear_rate(trace, 6, 1e-12);
  CHECK(std::abs(fit.rate - 0.25) <= 1e-9);
  CHECK_THROWS_AS(certify_linear_rate(trace, 10, 1e-12),
                  std::invalid_argument);
}

TEST_SUITE_END();
