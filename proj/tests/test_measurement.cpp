#include "robustam/measurement.hpp"

#include "robustam/fwht.hpp"
#include "robustam/image.hpp"
#include "robustam/instance_io.hpp"
#include "robustam/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace robustam;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE_BEGIN("measurement");

TEST_CASE("gaussian ensemble is deterministic in the seed") {
  const auto a = gaussian_ensemble(2, 3, 7);
  const auto b = gaussian_ensemble(2, 3, 7);
  const auto c = gaussian_ensemble(2, 3, 8);
  CHECK(a.matrix() == b.matrix());
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.matrix() != c.matrix());
}

TEST_CASE("gaussian column norms concentrate (chi-square)") {
  const auto op = gaussian_ensemble(100, 800, 1);
  for (Index j = 0; j < 100; ++j) {
    const double normalized = op.matrix().col(j).squaredNorm() / 800.0;
    CHECK(normalized >= 0.8);
    CHECK(normalized <= 1.2);
  }
}

TEST_CASE("gaussian mean absolute entry matches E|g| = sqrt(2/pi)") {
  const auto op = gaussian_ensemble(1, 100000, 3);
  const double mean_abs = op.matrix().cwiseAbs().mean();
  CHECK(std::abs(mean_abs - std::sqrt(2.0 / std::numbers::pi)) < 0.01);
}

TEST_CASE("hadamard ensemble with n = k = 1 is a sign scalar") {
  const auto op = hadamard_ensemble(1, 1, 0);
  VectorXd x(1);
  x << 2.5;
  const VectorXd y = op.apply(x);
  CHECK(y.size() == 1);
  CHECK(std::abs(y[0]) == doctest::Approx(2.5));
}

TEST_CASE("hadamard block is orthonormal for k = 1") {
  const auto op = hadamard_ensemble(4, 1, 5);
  RngStream rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    const VectorXd x = rng.normal_vector(4);
    CHECK(op.apply(x).norm() == doctest::Approx(x.norm()).epsilon(1e-12));
  }
}

TEST_CASE("hadamard tight frame: A^T A = k I at n = 256, k = 8") {
  const auto op = hadamard_ensemble(256, 8, 2);
  RngStream rng(123);
  for (int rep = 0; rep < 20; ++rep) {
    const VectorXd x = rng.normal_vector(256);
    const VectorXd back = op.apply_adjoint(op.apply(x));
    CHECK((back - 8.0 * x).norm() <= 1e-10 * 8.0 * x.norm());
  }
}

TEST_CASE("hadamard fast path matches the materialized matrix") {
  const auto op = hadamard_ensemble(64, 3, 11);
  const MatrixXd dense = op.materialize();
  // Cross-check the dense expansion independently: block j is H S_j.
  for (Index j = 0; j < 3; ++j) {
    for (Index col = 0; col < 64; ++col) {
      VectorXd e = VectorXd::Zero(64);
      e[col] = op.sign_diagonals()[static_cast<std::size_t>(j)][col];
      const VectorXd h_col = fwht(e);
      for (Index row = 0; row < 64; ++row) {
        CHECK(dense(j * 64 + row, col) ==
              doctest::Approx(h_col[row]).epsilon(1e-12));
      }
    }
  }
  RngStream rng(5);
  const VectorXd x = rng.normal_vector(64);
  CHECK((op.apply(x) - dense * x).lpNorm<Eigen::Infinity>() <= 1e-12);
  const VectorXd y = rng.normal_vector(64 * 3);
  CHECK((op.apply_adjoint(y) - dense.transpose() * y)
            .lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("hadamard ensemble rejects non-power-of-two n") {
  CHECK_THROWS_AS(hadamard_ensemble(6, 2, 0), DimensionError);
  CHECK_THROWS_AS(hadamard_ensemble(0, 2, 0), DimensionError);
}

TEST_CASE("dense apply: identity operator") {
  const auto op = MeasurementOperator::dense(MatrixXd::Identity(2, 2));
  VectorXd x(2);
  x << 3, -4;
  CHECK(op.apply(x) == x);
}

TEST_CASE("hadamard apply: all-plus diagonal maps e1 to the constant block") {
  const auto op = MeasurementOperator::hadamard(4, {VectorXd::Ones(4)});
  VectorXd e1 = VectorXd::Zero(4);
  e1[0] = 1.0;
  const VectorXd y = op.apply(e1);
  for (Index i = 0; i < 4; ++i) {
    CHECK(y[i] == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("adjoint identity <Ax, y> = <x, A^T y>") {
  const auto op = gaussian_ensemble(3, 5, 17);
  RngStream rng(3);
  const VectorXd x = rng.normal_vector(3);
  const VectorXd y = rng.normal_vector(5);
  CHECK(op.apply(x).dot(y) ==
        doctest::Approx(x.dot(op.apply_adjoint(y))).epsilon(1e-12));
}

TEST_CASE("apply rejects mismatched dimensions") {
  const auto op = gaussian_ensemble(3, 5, 17);
  CHECK_THROWS_AS(op.apply(VectorXd::Zero(4)), DimensionError);
  CHECK_THROWS_AS(op.apply_adjoint(VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("synthesize: no outliers reproduces clean amplitudes") {
  const auto op = gaussian_ensemble(4, 20, 21);
  RngStream rng(1);
  const VectorXd x_star = rng.normal_vector(4);
  OutlierSpec spec;
  spec.fraction = 0.0;
  const auto inst = synthesize_instance(op, x_star, spec, 77);
  CHECK(inst.outlier_support.empty());
  const VectorXd clean = op.apply(x_star).cwiseAbs();
  CHECK((inst.b - clean).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("synthesize: zero-valued outliers hit exactly floor(eta m) entries") {
  const Index m = 50;
  const auto op = gaussian_ensemble(4, m, 22);
  RngStream rng(2);
  const VectorXd x_star = rng.normal_vector(4);
  OutlierSpec spec;
  spec.fraction = 0.3;
  spec.value_model = OutlierValueModel::zero;
  const auto inst = synthesize_instance(op, x_star, spec, 78);
  CHECK(static_cast<Index>(inst.outlier_support.size()) == 15);
  const VectorXd clean = op.apply(x_star).cwiseAbs();
  for (Index idx : inst.outlier_support) {
    CHECK(inst.b[idx] == 0.0);
  }
  std::vector<bool> corrupted(m, false);
  for (Index idx : inst.outlier_support) corrupted[idx] = true;
  for (Index i = 0; i < m; ++i) {
    if (!corrupted[i]) CHECK(inst.b[i] == clean[i]);
  }
}

TEST_CASE("synthesize: cauchy outliers have median |xi| near 1") {
  const Index m = 10000;
  const auto op = gaussian_ensemble(2, m, 23);
  VectorXd x_star(2);
  x_star << 1.0, -0.5;
  OutlierSpec spec;
  spec.fraction = 0.25;
  spec.value_model = OutlierValueModel::cauchy;
  const auto inst = synthesize_instance(op, x_star, spec, 79);
  std::vector<double> magnitudes;
  for (Index idx : inst.outlier_support) {
    magnitudes.push_back(std::abs(inst.b[idx]));
  }
  std::nth_element(magnitudes.begin(),
                   magnitudes.begin() + magnitudes.size() / 2,
                   magnitudes.end());
  const double median = magnitudes[magnitudes.size() / 2];
  CHECK(median > 0.85);  // median of |Cauchy(0,1)| is tan(pi/4) = 1
  CHECK(median < 1.15);
}

TEST_CASE("synthesize: uniform outliers stay inside the stated interval") {
  const Index m = 200;
  const auto op = gaussian_ensemble(3, m, 24);
  RngStream rng(4);
  const VectorXd x_star = rng.normal_vector(3);
  OutlierSpec spec;
  spec.fraction = 0.2;
  spec.value_model = OutlierValueModel::uniform_scaled;
  const auto inst = synthesize_instance(op, x_star, spec, 80);
  const double halfwidth = 3.0 * x_star.squaredNorm() / 2.0;
  for (Index idx : inst.outlier_support) {
    CHECK(std::abs(inst.b[idx]) < halfwidth);
  }
}

TEST_CASE("synthesize is deterministic in the seed") {
  const auto op = gaussian_ensemble(4, 40, 25);
  RngStream rng(5);
  const VectorXd x_star = rng.normal_vector(4);
  OutlierSpec spec;
  spec.fraction = 0.25;
  spec.value_model = OutlierValueModel::cauchy;
  const auto a = synthesize_instance(op, x_star, spec, 81);
  const auto b = synthesize_instance(op, x_star, spec, 81);
  CHECK(a.b == b.b);
  CHECK(a.outlier_support == b.outlier_support);
}

TEST_CASE("outlier spec validation") {
  OutlierSpec spec;
  spec.fraction = 1.0;
  CHECK_THROWS_AS(spec.validate(10), std::invalid_argument);
  spec.fraction = 0.3;
  spec.support_rule = SupportRule::fixed_index_set;
  spec.fixed_support = {0, 1};  // needs exactly 3 for m = 10
  CHECK_THROWS_AS(spec.validate(10), std::invalid_argument);
  spec.fixed_support = {0, 1, 2};
  CHECK_NOTHROW(spec.validate(10));
}

TEST_CASE("fixed support is honored") {
  const auto op = gaussian_ensemble(3, 10, 26);
  RngStream rng(6);
  const VectorXd x_star = rng.normal_vector(3);
  OutlierSpec spec;
  spec.fraction = 0.3;
  spec.support_rule = SupportRule::fixed_index_set;
  spec.value_model = OutlierValueModel::zero;
  spec.fixed_support = {9, 0, 4};
  const auto inst = synthesize_instance(op, x_star, spec, 82);
  CHECK(inst.outlier_support == std::vector<Index>{0, 4, 9});
}

TEST_CASE("pgm round trip and vectorization") {
  GrayImage img;
  img.rows = 16;
  img.cols = 16;
  img.pixels.resize(256);
  for (std::size_t i = 0; i < 256; ++i) {
    img.pixels[i] = static_cast<double>(i % 17) / 16.0;
  }
  const auto path = temp_file("robustam_test_16x16.pgm");
  save_pgm(img, path);
  const GrayImage loaded = load_pgm(path);
  CHECK(loaded.rows == 16);
  CHECK(loaded.cols == 16);
  for (std::size_t i = 0; i < 256; ++i) {
    CHECK(std::abs(loaded.pixels[i] - img.pixels[i]) <= 1.0 / 255.0);
  }
  const VectorXd v = load_image_vector(path, 256);
  CHECK(v.size() == 256);
  CHECK(v[0] == loaded.pixels[0]);
  CHECK(v[255] == loaded.pixels[255]);
  std::filesystem::remove(path);
}

TEST_CASE("16 rows x 15 cols pads the last column with zeros") {
  GrayImage img;
  img.rows = 16;
  img.cols = 15;
  img.pixels.assign(16 * 15, 0.5);
  const VectorXd v = image_to_vector(img, 256);
  CHECK(v.size() == 256);
  for (Index r = 0; r < 16; ++r) {
    CHECK(v[r * 16 + 15] == 0.0);  // padded column
    CHECK(v[r * 16] == 0.5);
  }
}

TEST_CASE("all-black image vectorizes to zero") {
  GrayImage img;
  img.rows = 16;
  img.cols = 16;
  img.pixels.assign(256, 0.0);
  const VectorXd v = image_to_vector(img, 256);
  CHECK(v.norm() == 0.0);
}

TEST_CASE("image larger than the target length is rejected") {
  GrayImage img;
  img.rows = 32;
  img.cols = 32;
  img.pixels.assign(1024, 0.1);
  CHECK_THROWS_AS(image_to_vector(img, 256), DimensionError);
}

TEST_CASE("unreadable image file raises IoError") {
  CHECK_THROWS_AS(load_pgm(temp_file("robustam_does_not_exist.pgm")), IoError);
  const auto path = temp_file("robustam_not_a_pgm.pgm");
  std::ofstream(path) << "P3\n1 1\n255\n0\n";
  CHECK_THROWS_AS(load_pgm(path), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("synthetic digit images are usable ground truths") {
  const auto images = synthetic_digit_images(50, 31);
  CHECK(images.size() == 50);
  for (const auto& img : images) {
    CHECK(img.rows == 16);
    CHECK(img.cols == 16);
    CHECK_FALSE(img.all_zero());
    for (double p : img.pixels) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
    CHECK(image_to_vector(img).size() == 256);
  }
}

TEST_CASE("instance dump round trip (gaussian)") {
  const std::uint64_t op_seed = 41;
  auto op = gaussian_ensemble(6, 30, op_seed);
  RngStream rng(8);
  const VectorXd x_star = rng.normal_vector(6);
  OutlierSpec spec;
  spec.fraction = 0.2;
  spec.value_model = OutlierValueModel::cauchy;
  auto inst = synthesize_instance(std::move(op), x_star, spec, 83);
  inst.seeds.master = 1000;
  inst.seeds.operator_seed = op_seed;
  inst.seeds.operator_from_seed = true;

  const auto path = temp_file("robustam_instance.rami");
  save_instance(inst, path);
  const auto loaded = load_instance(path);
  CHECK(loaded.b == inst.b);
  CHECK(loaded.x_star == inst.x_star);
  CHECK(loaded.outlier_support == inst.outlier_support);
  CHECK(loaded.op.fingerprint() == inst.op.fingerprint());
  CHECK(loaded.seeds.master == 1000);
  std::filesystem::remove(path);
}

TEST_CASE("instance dump round trip (hadamard)") {
  const std::uint64_t op_seed = 42;
  auto op = hadamard_ensemble(32, 3, op_seed);
  RngStream rng(9);
  const VectorXd x_star = rng.normal_vector(32);
  OutlierSpec spec;
  spec.fraction = 0.1;
  auto inst = synthesize_instance(std::move(op), x_star, spec, 84);
  inst.seeds.operator_seed = op_seed;
  inst.seeds.operator_from_seed = true;

  const auto path = temp_file("robustam_instance_h.rami");
  save_instance(inst, path);
  const auto loaded = load_instance(path);
  CHECK(loaded.op.kind() == OperatorKind::hadamard);
  CHECK(loaded.op.fingerprint() == inst.op.fingerprint());
  CHECK(loaded.b == inst.b);
  std::filesystem::remove(path);
}

TEST_CASE("instances without a recorded operator seed cannot be saved") {
  auto op = gaussian_ensemble(3, 9, 1);
  RngStream rng(10);
  OutlierSpec spec;
  auto inst = synthesize_instance(std::move(op), rng.normal_vector(3), spec, 1);
  CHECK_FALSE(inst.seeds.operator_from_seed);
  CHECK_THROWS_AS(save_instance(inst, temp_file("robustam_nosave.rami")),
                  IoError);
}

TEST_SUITE_END();
