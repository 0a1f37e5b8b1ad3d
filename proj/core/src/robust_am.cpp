#include "robustam/robust_am.hpp"

#include "robustam/format.hpp"
#include "robustam/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace robustam {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double dist(const VectorXd& x, const VectorXd& y) {
  if (x.size() != y.size()) {
    throw DimensionError("dist: length mismatch");
  }
  return std::min((x - y).norm(), (x + y).norm());
}

VectorXd signed_targets(const MeasurementOperator& op, const VectorXd& b,
                        const VectorXd& x_k) {
  if (b.size() != op.rows()) {
    throw DimensionError("signed_targets: b length mismatch");
  }
  const VectorXd ax = op.apply(x_k);
  VectorXd c(b.size());
  for (Index i = 0; i < b.size(); ++i) {
    c[i] = sign_pm(ax[i]) * b[i];
  }
  return c;
}

const char* to_string(InnerSolver s) {
  switch (s) {
    case InnerSolver::admm_lad: return "admm_lad";
    case InnerSolver::admm_lp: return "admm_lp";
    case InnerSolver::subgradient: return "subgradient";
  }
  return "unknown";
}

std::optional<InnerSolver> inner_solver_from_string(const std::string& s) {
  if (s == "admm_lad") return InnerSolver::admm_lad;
  if (s == "admm_lp") return InnerSolver::admm_lp;
  if (s == "subgradient" || s == "rsg") return InnerSolver::subgradient;
  return std::nullopt;
}

const char* to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::success: return "success";
    case RecoveryStatus::max_outer: return "max_outer";
    case RecoveryStatus::stalled: return "stalled";
  }
  return "unknown";
}

void export_trace_csv(const IterateTrace& trace, std::ostream& out) {
  out << "k,dist,objective,inner_iters,wall_time_s\n";
  for (const TraceRow& row : trace.rows) {
    out << row.k << ',' << fmt_double(row.dist_to_truth) << ','
        << fmt_double(row.lad_objective) << ',' << row.inner_iterations << ','
        << fmt_double(row.wall_time_s) << '\n';
  }
}

RecoveryResult robust_am(const ProblemInstance& instance, const VectorXd& x0,
                         const RobustAmConfig& cfg) {
  const MeasurementOperator& op = instance.op;
  const Index d = op.cols();
  const Index m = op.rows();
  if (x0.size() != d) {
    throw DimensionError("robust_am: x0 length mismatch");
  }
  if (x0.norm() == 0.0) {
    throw std::invalid_argument(
        "robust_am: zero initialization rejected (its measurement signs are "
        "all convention)");
  }
  if (cfg.max_outer < 1 || !(cfg.change_tol > 0.0)) {
    throw std::invalid_argument("robust_am: invalid stopping configuration");
  }
  const bool have_truth = instance.x_star.size() == d;
  const bool benchmark = cfg.dist_tol > 0.0;
  if (benchmark && !have_truth) {
    throw std::invalid_argument(
        "robust_am: dist_tol stopping requires the ground truth");
  }

  const double epsilon_floor = cfg.inner_epsilon >= 0.0
                                   ? cfg.inner_epsilon
                                   : 1e-8 * static_cast<double>(m);
  double epsilon = cfg.inner_epsilon0 >= 0.0 ? cfg.inner_epsilon0
                                             : epsilon_floor;
  double decay = cfg.epsilon_decay;
  if (cfg.auto_epsilon_schedule) {
    epsilon = std::max(epsilon_floor, 1e-3 * instance.b.lpNorm<1>());
    if (decay == 1.0) decay = 0.05;
  }
  if (!(decay > 0.0) || decay > 1.0) {
    throw std::invalid_argument("robust_am: epsilon decay must be in (0, 1]");
  }

  RecoveryResult result;
  if (cfg.record_trace) result.trace.emplace();

  auto truth_dist = [&](const VectorXd& x) {
    return have_truth ? dist(x, instance.x_star)
                      : std::numeric_limits<double>::quiet_NaN();
  };

  VectorXd x = x0;
  if (cfg.record_trace) {
    // Row k = 0 is the initial state; its objective is the true LAD value
    // (1/m) sum | |<a_i,x0>| - b_i |, which equals the signed-target
    // objective at x0.
    result.trace->rows.push_back(
        {0, truth_dist(x), lad_objective(op, signed_targets(op, instance.b, x), x),
         0, 0.0});
  }
  if (benchmark && truth_dist(x) <= cfg.dist_tol) {
    result.x_hat = x;
    result.status = RecoveryStatus::success;
    return result;
  }

  // One cache per run, reused by every outer iteration.
  std::optional<LsCache> ls_cache;
  std::optional<LpCache> lp_cache;
  {
    const auto start = Clock::now();
    if (cfg.inner == InnerSolver::admm_lad) {
      ls_cache.emplace(build_ls_cache(op));
      result.cache_builds = 1;
    } else if (cfg.inner == InnerSolver::admm_lp) {
      lp_cache.emplace(build_lp_cache(op, cfg.lp_m_cap));
      result.cache_builds = 1;
    }
    result.cache_build_s = seconds_since(start);
  }

  RecoveryStatus status = RecoveryStatus::max_outer;
  int outer = 0;
  for (int k = 1; k <= cfg.max_outer; ++k) {
    const auto start = Clock::now();
    SignedLadProblem problem;
    problem.op = &op;
    problem.target = signed_targets(op, instance.b, x);
    problem.warm_start = x;
    problem.tolerance = std::max(std::max(epsilon, epsilon_floor), 1e-300);

    LadSolution sol;
    switch (cfg.inner) {
      case InnerSolver::admm_lad:
        sol = solve_lad_admm(problem, *ls_cache, cfg.admm);
        break;
      case InnerSolver::admm_lp:
        sol = solve_lad_lp_admm(problem, *lp_cache, cfg.admm);
        break;
      case InnerSolver::subgradient:
        sol = solve_lad_subgradient(problem, cfg.rsg);
        break;
    }
    epsilon *= decay;

    const double rel_change = (sol.x - x).norm() / x.norm();
    x = std::move(sol.x);
    outer = k;

    const double d_truth = truth_dist(x);
    if (cfg.record_trace) {
      result.trace->rows.push_back(
          {k, d_truth, sol.objective, sol.iterations, seconds_since(start)});
    }

    if (benchmark && d_truth <= cfg.dist_tol) {
      status = RecoveryStatus::success;
      break;
    }
    if (rel_change <= cfg.change_tol) {
      // In benchmark mode a frozen iterate above dist_tol is a stall, not a
      // recovery.
      status = benchmark ? RecoveryStatus::stalled : RecoveryStatus::success;
      break;
    }
  }

  result.x_hat = std::move(x);
  result.outer_iterations = outer;
  result.status = status;
  return result;
}

SpectralResult spectral_init(const ProblemInstance& instance,
                             const SpectralConfig& cfg) {
  const MeasurementOperator& op = instance.op;
  const Index m = op.rows();
  const Index d = op.cols();
  if (m < 1) {
    throw DimensionError("spectral_init: no measurements");
  }
  if (!(cfg.truncation_factor > 0.0) || cfg.power_iters < 1 ||
      !(cfg.tol > 0.0)) {
    throw std::invalid_argument("spectral_init: invalid configuration");
  }
  const VectorXd& b = instance.b;

  // Exact zeros carry no amplitude information (and zero-valued corruption
  // produces them in bulk), so they are treated as erasures for the scale
  // estimate and the truncation cutoff.
  std::vector<double> positive;
  positive.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    if (b[i] > 0.0) positive.push_back(b[i]);
  }
  if (positive.empty()) {
    throw std::runtime_error(
        "spectral_init: all measurements are zero (degenerate b)");
  }
  const std::size_t half = positive.size() / 2;
  std::nth_element(positive.begin(), positive.begin() + half, positive.end());
  double median = positive[half];
  if (positive.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(positive.begin(),
                                               positive.begin() + half));
  }

  // |<a_i, x>| ~ |N(0, s^2 ||x||^2)| where s^2 is the average row norm
  // squared over d; median of |N(0,1)| = 0.6745. s = 1 for the Gaussian
  // ensemble and 1/sqrt(n) for the normalized Hadamard one.
  const double row_scale = std::sqrt(op.squared_frobenius_norm() /
                                     (static_cast<double>(m) *
                                      static_cast<double>(d)));
  const double norm_estimate = median / (0.6745 * row_scale);

  const double cutoff = cfg.truncation_factor * median;
  VectorXd weights(m);
  Index kept = 0;
  for (Index i = 0; i < m; ++i) {
    if (b[i] <= cutoff && b[i] > 0.0) {
      weights[i] = b[i] * b[i] / static_cast<double>(m);
      ++kept;
    } else {
      weights[i] = 0.0;
    }
  }
  if (kept == 0) {
    throw std::runtime_error(
        "spectral_init: truncation removed every measurement (degenerate b)");
  }

  const std::uint64_t seed =
      cfg.seed != 0
          ? cfg.seed
          : derive_seed(instance.seeds.instance_seed, "spectral_init");
  RngStream rng(seed);
  VectorXd v = rng.unit_vector(d);
  VectorXd prev(d);
  SpectralResult result;
  result.power_converged = false;
  for (int it = 1; it <= cfg.power_iters; ++it) {
    prev = v;
    VectorXd av = op.apply(v);
    v = op.apply_adjoint(weights.cwiseProduct(av));
    const double norm = v.norm();
    if (norm == 0.0) {
      throw std::runtime_error("spectral_init: weighted covariance is zero");
    }
    v /= norm;
    result.iterations = it;
    if (std::min((v - prev).norm(), (v + prev).norm()) <= cfg.tol) {
      result.power_converged = true;
      break;
    }
  }
  result.x0 = norm_estimate * v;
  return result;
}

VectorXd oracle_init(const VectorXd& x_star, double radius_fraction,
                     std::uint64_t seed) {
  if (!(radius_fraction >= 0.0 && radius_fraction < 1.0)) {
    throw std::invalid_argument(
        "oracle_init: radius fraction must lie in [0, 1)");
  }
  RngStream rng = derive_stream(seed, "oracle_init");
  const VectorXd u = rng.unit_vector(x_star.size());
  return x_star + radius_fraction * x_star.norm() * u;
}

}  // namespace robustam
