#pragma once

#include "robustam/common.hpp"
#include "robustam/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace robustam {

enum class OperatorKind { dense, hadamard };

/// Measurement ensemble A in R^{m x d}. Either an explicit dense matrix or a
/// structured sign-modulated Hadamard operator
///   A = (I_k (x) H_n) [S_1,...,S_k]^T,  m = k*n, d = n,
/// with H_n the orthonormal Walsh-Hadamard matrix and S_j diagonal +-1.
/// The structured kind stores only the k sign diagonals and applies A / A^T
/// through the fast transform in O(k n log n). For it, A^T A = k I.
///
/// Operators are immutable after construction and safe to share across
/// threads.
class MeasurementOperator {
 public:
  /// Empty placeholder; every accessor except kind()/rows()/cols() throws
  /// until a real operator is assigned.
  MeasurementOperator() = default;

  static MeasurementOperator dense(MatrixXd a);
  static MeasurementOperator hadamard(Index n,
                                      std::vector<VectorXd> sign_diagonals);

  OperatorKind kind() const { return kind_; }
  Index rows() const { return m_; }
  Index cols() const { return d_; }

  /// Number of sign modulations k (hadamard kind only).
  Index modulations() const { return static_cast<Index>(diagonals_.size()); }

  /// The explicit matrix (dense kind only).
  const MatrixXd& matrix() const;

  const std::vector<VectorXd>& sign_diagonals() const { return diagonals_; }

  /// A * x.
  VectorXd apply(const VectorXd& x) const;

  /// A^T * y.
  VectorXd apply_adjoint(const VectorXd& y) const;

  /// Explicit m x d matrix; for the hadamard kind it is built column by
  /// column from the transform (guarded to n <= 4096).
  MatrixXd materialize() const;

  double squared_frobenius_norm() const;

  /// Content hash: kind, dimensions and all payload entries. Used by the
  /// solver caches to detect being paired with a different operator.
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  OperatorKind kind_ = OperatorKind::dense;
  Index m_ = 0;
  Index d_ = 0;
  MatrixXd a_;                        // dense kind
  std::vector<VectorXd> diagonals_;   // hadamard kind
  std::uint64_t fingerprint_ = 0;
};

/// Dense operator with i.i.d. standard normal entries, deterministic in the
/// seed (row-major fill order).
MeasurementOperator gaussian_ensemble(Index d, Index m, std::uint64_t seed);

/// Structured operator with k sign diagonals drawn uniformly from {-1,+1};
/// n must be a power of two.
MeasurementOperator hadamard_ensemble(Index n, Index k, std::uint64_t seed);

enum class SupportRule { uniform_random, fixed_index_set };
enum class OutlierValueModel { cauchy, uniform_scaled, zero };

/// Sparse corruption model: floor(fraction*m) measurement entries are
/// replaced by values drawn from the chosen model.
///   cauchy         xi ~ Cauchy(median 0, scale cauchy_scale)
///   uniform_scaled xi ~ U(-w, w), w = uniform_halfwidth_scale * d*||x*||^2/2
///   zero           xi = 0
struct OutlierSpec {
  double fraction = 0.0;
  SupportRule support_rule = SupportRule::uniform_random;
  OutlierValueModel value_model = OutlierValueModel::zero;
  double cauchy_scale = 1.0;
  double uniform_halfwidth_scale = 1.0;
  std::vector<Index> fixed_support;  // used when support_rule is fixed

  Index outlier_count(Index m) const;
  void validate(Index m) const;
};

struct SeedManifest {
  std::uint64_t master = 0;
  std::uint64_t operator_seed = 0;
  std::uint64_t instance_seed = 0;
  bool operator_from_seed = false;  // operator reconstructible from its seed
};

/// One synthetic problem: b_i = |<a_i, x*>| on inliers, b_i = xi_i on the
/// outlier support. Immutable after construction.
struct ProblemInstance {
  MeasurementOperator op;
  VectorXd b;
  VectorXd x_star;
  std::vector<Index> outlier_support;  // sorted
  double outlier_fraction = 0.0;
  SeedManifest seeds;
};

ProblemInstance synthesize_instance(MeasurementOperator op,
                                    const VectorXd& x_star,
                                    const OutlierSpec& spec,
                                    std::uint64_t seed);

const char* to_string(OutlierValueModel m);
std::optional<OutlierValueModel> outlier_model_from_string(
    const std::string& s);

}  // namespace robustam
