#pragma once

#include "robustam/measurement.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace robustam {

/// One signed least-absolute-deviation subproblem
///   min_x (1/m) sum_i |<a_i, x> - c_i|
/// where c holds the sign-adjusted measurements of the current outer
/// iterate. `tolerance` is the admissible sub-optimality of the returned
/// point measured on the unnormalized objective sum_i |<a_i,x> - c_i|.
struct SignedLadProblem {
  const MeasurementOperator* op = nullptr;
  VectorXd target;
  std::optional<VectorXd> warm_start;
  double tolerance = 1e-8;
};

enum class SolveStatus { converged, max_iters };

struct InnerTraceRow {
  int iter;
  double objective;
  double primal_res;
  double dual_res;
  double rho;
};

struct LadSolution {
  VectorXd x;
  double objective = 0.0;  // (1/m) sum_i |<a_i,x> - c_i| at the returned x
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  SolveStatus status = SolveStatus::max_iters;
  std::vector<InnerTraceRow> trace;  // filled when requested
};

/// Shared knobs of both ADMM variants. The stopping rule is the standard
/// absolute/relative residual test; a problem tolerance eps additionally
/// caps both thresholds at eps/m, so the solve is stopped once the residual
/// bound on the objective change, scaled by m, falls below eps.
struct AdmmConfig {
  double rho0 = 1.0;
  bool vary_rho = true;  // residual balancing
  double mu = 10.0;
  double tau_incr = 2.0;
  double tau_decr = 2.0;
  int max_iters = 20000;
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  bool record_trace = false;

  void validate() const;
};

/// Reusable least-squares factorization of a measurement operator: one QR
/// (or, for the structured kind, the identity A^T A = k I) paid once and
/// shared by every inner and outer iteration against the same operator.
class LsCache {
 public:
  /// argmin_x ||A x - r||_2.
  VectorXd solve(const VectorXd& r) const;

  Index rows() const { return m_; }
  Index cols() const { return d_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  friend LsCache build_ls_cache(const MeasurementOperator& op);

  bool structured_ = false;
  double inv_k_ = 1.0;
  MeasurementOperator op_;  // structured kind only
  MatrixXd pinv_;           // dense kind: explicit pseudoinverse, d x m
  Index m_ = 0;
  Index d_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Requires m >= d and full column rank; rank is checked against the
/// threshold 1e-10 * ||A||_F on the pivoted-QR diagonal.
LsCache build_ls_cache(const MeasurementOperator& op);

/// ADMM for the LAD subproblem, split min ||y - c||_1 s.t. Ax = y:
///   x <- A+ (y - phi/rho)
///   y <- c + sign(Ax + phi/rho - c) .* [|Ax + phi/rho - c| - 1/rho]_+
///   phi <- phi + rho (Ax - y)
/// phi is the unscaled dual, so residual balancing of rho needs no explicit
/// rescaling (the scaled dual phi/rho adjusts implicitly).
LadSolution solve_lad_admm(const SignedLadProblem& p, const LsCache& cache,
                           const AdmmConfig& cfg);

/// Reusable factorization for the LP route. The subproblem in standard form
/// over w = [x; t; u; s] in R^{d+3m}:
///   min <c_lin, w>  s.t.  B w = [c; c],  u, s >= 0,
///   B = [[A, -I, 0, I], [A, I, -I, 0]],  c_lin = [0; 1_m; 0; 0].
/// The w-update needs (I + B^T B)^{-1}, applied through the inversion lemma
///   (I + B^T B)^{-1} = I - B^T (I_{2m} + B B^T)^{-1} B.
/// B B^T has commuting blocks ([[G+2I, G-I], [G-I, G+2I]] with G = A A^T),
/// so (I + B B^T) diagonalizes over the (v; v) / (v; -v) split and only an
/// m x m Cholesky factor of (G + I) is stored.
class LpCache {
 public:
  Index rows() const { return m_; }
  Index cols() const { return d_; }
  Index lifted_size() const { return d_ + 3 * m_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// B w for w in R^{d+3m}.
  VectorXd apply_b(const VectorXd& w) const;
  /// B^T v for v in R^{2m}.
  VectorXd apply_bt(const VectorXd& v) const;
  /// (I + B^T B)^{-1} rhs via the inversion lemma.
  VectorXd solve_normal(const VectorXd& rhs) const;

  const MatrixXd& materialized() const { return a_; }

 private:
  friend LpCache build_lp_cache(const MeasurementOperator& op, Index m_cap);

  VectorXd solve_gram(const VectorXd& v) const;  // (I + B B^T)^{-1} v

  Index m_ = 0;
  Index d_ = 0;
  MatrixXd a_;
  Eigen::LLT<MatrixXd> g_plus_i_;
  std::uint64_t fingerprint_ = 0;
};

/// Materializes the operator and factors (G + I); rejected when m exceeds
/// m_cap since the factorization costs O(m^3) time and O(m^2) memory.
LpCache build_lp_cache(const MeasurementOperator& op, Index m_cap = 2048);

/// Two-block ADMM on the standard-form LP above (constraints B w = p and
/// w = y with the sign constraint kept on y's (u, s) blocks). x is read off
/// the first d coordinates of w.
LadSolution solve_lad_lp_admm(const SignedLadProblem& p, const LpCache& cache,
                              const AdmmConfig& cfg);

/// Restarted subgradient: step size constant for `restart_period` iterations,
/// then halved; `epochs` halvings in total. Zero values select automatic
/// choices: restart_period = 100*ceil(log2 m) and eta0 from a Polyak-type
/// estimate at the starting point.
struct RsgConfig {
  double eta0 = 0.0;
  int restart_period = 0;
  int epochs = 20;
  bool record_trace = false;

  void validate() const;
};

LadSolution solve_lad_subgradient(const SignedLadProblem& p,
                                  const RsgConfig& cfg);

/// (1/m) sum_i |<a_i, x> - c_i|.
double lad_objective(const MeasurementOperator& op, const VectorXd& c,
                     const VectorXd& x);

}  // namespace robustam
