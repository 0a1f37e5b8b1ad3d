#include "robustam/measurement.hpp"

#include "robustam/fwht.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace robustam {

namespace {

std::uint64_t fnv1a_bytes(const void* data, std::size_t size,
                          std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

MeasurementOperator MeasurementOperator::dense(MatrixXd a) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw DimensionError("dense operator: empty matrix");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("dense operator: non-finite entries");
  }
  MeasurementOperator op;
  op.kind_ = OperatorKind::dense;
  op.m_ = a.rows();
  op.d_ = a.cols();
  op.a_ = std::move(a);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a_bytes(&op.m_, sizeof(op.m_), h);
  h = fnv1a_bytes(&op.d_, sizeof(op.d_), h);
  h = fnv1a_bytes(op.a_.data(),
                  sizeof(double) * static_cast<std::size_t>(op.a_.size()), h);
  op.fingerprint_ = h;
  return op;
}

MeasurementOperator MeasurementOperator::hadamard(
    Index n, std::vector<VectorXd> sign_diagonals) {
  if (!is_power_of_two(n)) {
    throw DimensionError("hadamard operator: n = " + std::to_string(n) +
                         " is not a power of two");
  }
  if (sign_diagonals.empty()) {
    throw DimensionError("hadamard operator: needs at least one diagonal");
  }
  for (const auto& s : sign_diagonals) {
    if (s.size() != n) {
      throw DimensionError("hadamard operator: diagonal length mismatch");
    }
    for (Index i = 0; i < n; ++i) {
      if (s[i] != 1.0 && s[i] != -1.0) {
        throw std::invalid_argument(
            "hadamard operator: diagonal entries must be +-1");
      }
    }
  }
  MeasurementOperator op;
  op.kind_ = OperatorKind::hadamard;
  op.d_ = n;
  op.m_ = n * static_cast<Index>(sign_diagonals.size());
  op.diagonals_ = std::move(sign_diagonals);
  std::uint64_t h = 0x100001b3cbf29ce4ULL;
  h = fnv1a_bytes(&op.m_, sizeof(op.m_), h);
  h = fnv1a_bytes(&op.d_, sizeof(op.d_), h);
  for (const auto& s : op.diagonals_) {
    h = fnv1a_bytes(s.data(), sizeof(double) * static_cast<std::size_t>(n), h);
  }
  op.fingerprint_ = h;
  return op;
}

const MatrixXd& MeasurementOperator::matrix() const {
  if (kind_ != OperatorKind::dense) {
    throw std::logic_error("matrix(): operator is not dense");
  }
  return a_;
}

VectorXd MeasurementOperator::apply(const VectorXd& x) const {
  if (x.size() != d_) {
    throw DimensionError("apply: x has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(d_));
  }
  if (kind_ == OperatorKind::dense) {
    return a_ * x;
  }
  const Index n = d_;
  VectorXd out(m_);
  VectorXd block(n);
  for (std::size_t j = 0; j < diagonals_.size(); ++j) {
    block = diagonals_[j].cwiseProduct(x);
    fwht_inplace(block, /*normalize=*/true);
    out.segment(static_cast<Index>(j) * n, n) = block;
  }
  return out;
}

VectorXd MeasurementOperator::apply_adjoint(const VectorXd& y) const {
  if (y.size() != m_) {
    throw DimensionError("apply_adjoint: y has length " +
                         std::to_string(y.size()) + ", expected " +
                         std::to_string(m_));
  }
  if (kind_ == OperatorKind::dense) {
    return a_.transpose() * y;
  }
  const Index n = d_;
  VectorXd out = VectorXd::Zero(n);
  VectorXd block(n);
  for (std::size_t j = 0; j < diagonals_.size(); ++j) {
    block = y.segment(static_cast<Index>(j) * n, n);
    // H_n is symmetric, so the adjoint block is S_j H_n.
    fwht_inplace(block, /*normalize=*/true);
    out += diagonals_[j].cwiseProduct(block);
  }
  return out;
}

MatrixXd MeasurementOperator::materialize() const {
  if (kind_ == OperatorKind::dense) {
    return a_;
  }
  if (d_ > 4096) {
    throw std::length_error(
        "materialize: hadamard operator too large to expand (n > 4096)");
  }
  MatrixXd out(m_, d_);
  VectorXd e = VectorXd::Zero(d_);
  for (Index col = 0; col < d_; ++col) {
    e[col] = 1.0;
    out.col(col) = apply(e);
    e[col] = 0.0;
  }
  return out;
}

double MeasurementOperator::squared_frobenius_norm() const {
  if (kind_ == OperatorKind::dense) {
    return a_.squaredNorm();
  }
  // Each block H_n S_j is orthonormal, so its squared Frobenius norm is n.
  return static_cast<double>(m_);
}

MeasurementOperator gaussian_ensemble(Index d, Index m, std::uint64_t seed) {
  if (d < 1 || m < 1) {
    throw DimensionError("gaussian_ensemble: m and d must be positive");
  }
  RngStream rng = derive_stream(seed, "gaussian_ensemble");
  MatrixXd a(m, d);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < d; ++j) {
      a(i, j) = rng.normal();
    }
  }
  return MeasurementOperator::dense(std::move(a));
}

MeasurementOperator hadamard_ensemble(Index n, Index k, std::uint64_t seed) {
  if (!is_power_of_two(n)) {
    throw DimensionError("hadamard_ensemble: n = " + std::to_string(n) +
                         " is not a power of two");
  }
  if (k < 1) {
    throw DimensionError("hadamard_ensemble: k must be positive");
  }
  RngStream rng = derive_stream(seed, "hadamard_ensemble");
  std::vector<VectorXd> diagonals(static_cast<std::size_t>(k));
  for (auto& s : diagonals) {
    s.resize(n);
    for (Index i = 0; i < n; ++i) {
      s[i] = (rng.next_u64() & 1u) ? 1.0 : -1.0;
    }
  }
  return MeasurementOperator::hadamard(n, std::move(diagonals));
}

Index OutlierSpec::outlier_count(Index m) const {
  return static_cast<Index>(std::floor(fraction * static_cast<double>(m)));
}

void OutlierSpec::validate(Index m) const {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("outlier fraction must lie in [0, 1)");
  }
  const Index count = outlier_count(m);
  if (count >= m && count > 0) {
    throw std::invalid_argument("outlier count must be below m");
  }
  if (support_rule == SupportRule::fixed_index_set) {
    if (static_cast<Index>(fixed_support.size()) != count) {
      throw std::invalid_argument(
          "fixed outlier support must contain exactly floor(fraction*m) "
          "indices");
    }
    for (Index idx : fixed_support) {
      if (idx < 0 || idx >= m) {
        throw std::invalid_argument("fixed outlier support index out of range");
      }
    }
  }
}

ProblemInstance synthesize_instance(MeasurementOperator op,
                                    const VectorXd& x_star,
                                    const OutlierSpec& spec,
                                    std::uint64_t seed) {
  if (x_star.size() != op.cols()) {
    throw DimensionError("synthesize_instance: x_star length mismatch");
  }
  if (!x_star.allFinite()) {
    throw std::invalid_argument("synthesize_instance: x_star not finite");
  }
  const Index m = op.rows();
  spec.validate(m);

  ProblemInstance inst;
  inst.b = op.apply(x_star).cwiseAbs();
  inst.outlier_fraction = spec.fraction;

  const Index count = spec.outlier_count(m);
  if (count > 0) {
    if (spec.support_rule == SupportRule::fixed_index_set) {
      inst.outlier_support = spec.fixed_support;
      std::sort(inst.outlier_support.begin(), inst.outlier_support.end());
    } else {
      RngStream support_rng = derive_stream(seed, "outlier_support");
      inst.outlier_support = support_rng.subset(m, count);
    }
    RngStream value_rng = derive_stream(seed, "outlier_values");
    const double uniform_halfwidth = spec.uniform_halfwidth_scale *
                                     static_cast<double>(op.cols()) *
                                     x_star.squaredNorm() / 2.0;
    for (Index idx : inst.outlier_support) {
      switch (spec.value_model) {
        case OutlierValueModel::cauchy:
          inst.b[idx] = value_rng.cauchy(spec.cauchy_scale);
          break;
        case OutlierValueModel::uniform_scaled:
          inst.b[idx] = value_rng.uniform(-uniform_halfwidth, uniform_halfwidth);
          break;
        case OutlierValueModel::zero:
          inst.b[idx] = 0.0;
          break;
      }
    }
  }

  inst.x_star = x_star;
  inst.seeds.instance_seed = seed;
  inst.op = std::move(op);
  return inst;
}

const char* to_string(OutlierValueModel m) {
  switch (m) {
    case OutlierValueModel::cauchy: return "cauchy";
    case OutlierValueModel::uniform_scaled: return "uniform";
    case OutlierValueModel::zero: return "zero";
  }
  return "unknown";
}

std::optional<OutlierValueModel> outlier_model_from_string(
    const std::string& s) {
  if (s == "cauchy") return OutlierValueModel::cauchy;
  if (s == "uniform" || s == "uniform_scaled") {
    return OutlierValueModel::uniform_scaled;
  }
  if (s == "zero") return OutlierValueModel::zero;
  return std::nullopt;
}

}  // namespace robustam
