#pragma once

#include "robustam/inner_solvers.hpp"
#include "robustam/measurement.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>

namespace robustam {

/// Sign-ambiguity-aware error: min over alpha in {-1,+1} of ||x - alpha y||.
double dist(const VectorXd& x, const VectorXd& y);

/// c_i = sign(<a_i, x_k>) * b_i with sign(0) = +1.
VectorXd signed_targets(const MeasurementOperator& op, const VectorXd& b,
                        const VectorXd& x_k);

enum class InnerSolver { admm_lad, admm_lp, subgradient };

const char* to_string(InnerSolver s);
std::optional<InnerSolver> inner_solver_from_string(const std::string& s);

struct RobustAmConfig {
  InnerSolver inner = InnerSolver::admm_lad;
  AdmmConfig admm;
  RsgConfig rsg;
  int max_outer = 100;
  /// Benchmark-only stop: succeed once dist(x_k, x*) <= dist_tol. Requires
  /// the instance to carry its ground truth; 0 disables.
  double dist_tol = 0.0;
  /// Blind stop on the relative iterate change.
  double change_tol = 1e-10;
  /// Sub-optimality budget for each inner solve, measured on the
  /// unnormalized objective; negative selects the default 1e-8 * m. With a
  /// geometric schedule this is the floor the budget decays to.
  double inner_epsilon = -1.0;
  /// Start of the geometric budget schedule; negative means "equal to the
  /// floor", i.e. a fixed budget (the default).
  double inner_epsilon0 = -1.0;
  /// Per-outer-iteration decay of the inner budget (1 = fixed).
  double epsilon_decay = 1.0;
  /// Convenience switch: start the budget at 1e-3 * ||b||_1 and decay by
  /// 0.05 per outer iteration down to the floor. Early outer iterations only
  /// fix sign patterns, so solving them tightly is wasted work; the floor
  /// still governs the final solves.
  bool auto_epsilon_schedule = false;
  bool record_trace = false;
  Index lp_m_cap = 2048;
};

struct TraceRow {
  int k;
  double dist_to_truth;  // NaN when the ground truth is unknown
  double lad_objective;
  int inner_iterations;
  double wall_time_s;
};

struct IterateTrace {
  std::vector<TraceRow> rows;
};

/// CSV with header k,dist,objective,inner_iters,wall_time_s.
void export_trace_csv(const IterateTrace& trace, std::ostream& out);

enum class RecoveryStatus { success, max_outer, stalled };

const char* to_string(RecoveryStatus s);

struct RecoveryResult {
  VectorXd x_hat;
  int outer_iterations = 0;
  RecoveryStatus status = RecoveryStatus::max_outer;
  std::optional<IterateTrace> trace;
  int cache_builds = 0;
  double cache_build_s = 0.0;
};

/// The outer loop: re-sign the measurements at the current iterate, solve
/// the signed LAD subproblem warm-started from it, repeat. Factorization
/// caches are built once per call and shared by all outer iterations.
/// x0 must be nonzero (the sign pattern of the zero vector carries no
/// information beyond the sign convention).
RecoveryResult robust_am(const ProblemInstance& instance, const VectorXd& x0,
                         const RobustAmConfig& cfg);

struct SpectralConfig {
  double truncation_factor = 3.0;
  int power_iters = 200;
  double tol = 1e-8;
  /// Stream seed for the power-iteration start; 0 derives one from the
  /// instance seeds.
  std::uint64_t seed = 0;
};

struct SpectralResult {
  VectorXd x0;
  bool power_converged = true;
  int iterations = 0;
};

/// Truncated spectral estimate: direction from the leading eigenvector of
///   Y = (1/m) sum_i b_i^2 a_i a_i^T 1{b_i <= gamma * median(b)}
/// by matrix-free power iteration; magnitude from median(b) / 0.6745
/// rescaled by the ensemble's average row norm (1 for the Gaussian kind).
SpectralResult spectral_init(const ProblemInstance& instance,
                             const SpectralConfig& cfg = {});

/// x* + radius_fraction * ||x*|| * u for a uniformly random unit u; lands
/// exactly at distance radius_fraction * ||x*|| from the truth.
VectorXd oracle_init(const VectorXd& x_star, double radius_fraction,
                     std::uint64_t seed);

}  // namespace robustam
