#include "robustam/fwht.hpp"
#include "robustam/rng.hpp"

#include <doctest.h>

using namespace robustam;

TEST_SUITE_BEGIN("fwht");

TEST_CASE("normalized transform of e1 is the constant vector") {
  VectorXd v = VectorXd::Zero(8);
  v[0] = 1.0;
  fwht_inplace(v);
  for (Index i = 0; i < 8; ++i) {
    CHECK(v[i] == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-14));
  }
}

TEST_CASE("hand-computed unnormalized transform at n = 4") {
  VectorXd v(4);
  v << 1, 2, 3, 4;
  fwht_inplace(v, /*normalize=*/false);
  // Sylvester H4 rows: (1 1 1 1), (1 -1 1 -1), (1 1 -1 -1), (1 -1 -1 1).
  CHECK(v[0] == 10.0);
  CHECK(v[1] == -2.0);
  CHECK(v[2] == -4.0);
  CHECK(v[3] == 0.0);
}

TEST_CASE("normalized transform is an involution") {
  RngStream rng(42);
  VectorXd v = rng.normal_vector(64);
  VectorXd w = fwht(fwht(v));
  CHECK((w - v).norm() <= 1e-12 * v.norm());
}

TEST_CASE("normalized transform preserves the norm") {
  RngStream rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    VectorXd v = rng.normal_vector(128);
    CHECK(fwht(v).norm() == doctest::Approx(v.norm()).epsilon(1e-13));
  }
}

TEST_CASE("non-power-of-two length is rejected") {
  VectorXd v = VectorXd::Zero(5);
  CHECK_THROWS_AS(fwht_inplace(v), DimensionError);
}

TEST_CASE("length one is the identity") {
  VectorXd v(1);
  v << -3.5;
  fwht_inplace(v);
  CHECK(v[0] == -3.5);
}

TEST_SUITE_END();
