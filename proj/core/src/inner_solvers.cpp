#include "robustam/inner_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace robustam {

namespace {

void check_problem(const SignedLadProblem& p, std::uint64_t cache_fingerprint,
                   Index m, Index d) {
  if (p.op == nullptr) {
    throw std::invalid_argument("lad solve: problem has no operator");
  }
  if (p.op->fingerprint() != cache_fingerprint) {
    throw std::invalid_argument(
        "lad solve: cache fingerprint does not match the problem operator");
  }
  if (p.target.size() != m) {
    throw DimensionError("lad solve: target length mismatch");
  }
  if (!p.target.allFinite()) {
    throw std::invalid_argument("lad solve: non-finite target");
  }
  if (!(p.tolerance > 0.0)) {
    throw std::invalid_argument("lad solve: tolerance must be positive");
  }
  if (p.warm_start && p.warm_start->size() != d) {
    throw DimensionError("lad solve: warm start length mismatch");
  }
}

// The problem's sub-optimality budget eps maps onto the residual thresholds
// as eps/m; the config tolerances act as the precision floor, so a generous
// budget loosens the stop while a tiny one never pushes the solver below
// the configured floor.
double effective_tol(double cfg_tol, double eps, Index m) {
  return std::max(cfg_tol, eps / static_cast<double>(m));
}

// Residual balancing is applied on a cadence and then frozen: once rho stops
// moving the fixed-penalty convergence regime takes over, instead of the
// iterates being kicked by late rho changes.
constexpr int kRhoAdaptEvery = 25;
constexpr int kRhoAdaptUntil = 2000;

bool want_rho_adapt(const AdmmConfig& cfg, int t) {
  return cfg.vary_rho && t % kRhoAdaptEvery == 0 && t <= kRhoAdaptUntil;
}

}  // namespace

void AdmmConfig::validate() const {
  if (!(rho0 > 0.0) || !(mu > 0.0) || !(abs_tol > 0.0) || !(rel_tol > 0.0) ||
      max_iters < 1) {
    throw std::invalid_argument("admm config: parameters must be positive");
  }
  if (!(tau_incr > 1.0) || !(tau_decr > 1.0)) {
    throw std::invalid_argument("admm config: tau factors must exceed 1");
  }
}

void RsgConfig::validate() const {
  if (eta0 < 0.0 || restart_period < 0 || epochs < 1) {
    throw std::invalid_argument("rsg config: invalid parameters");
  }
}

double lad_objective(const MeasurementOperator& op, const VectorXd& c,
                     const VectorXd& x) {
  if (c.size() != op.rows()) {
    throw DimensionError("lad_objective: target length mismatch");
  }
  if (x.size() != op.cols()) {
    throw DimensionError("lad_objective: x length mismatch");
  }
  return (op.apply(x) - c).lpNorm<1>() / static_cast<double>(op.rows());
}

// ---------------------------------------------------------------------------
// Least-squares cache

LsCache build_ls_cache(const MeasurementOperator& op) {
  LsCache cache;
  cache.m_ = op.rows();
  cache.d_ = op.cols();
  cache.fingerprint_ = op.fingerprint();
  if (op.kind() == OperatorKind::hadamard) {
    // A^T A = k I, so A+ = A^T / k.
    cache.structured_ = true;
    cache.inv_k_ = 1.0 / static_cast<double>(op.modulations());
    cache.op_ = op;
    return cache;
  }
  const MatrixXd& a = op.matrix();
  if (a.rows() < a.cols()) {
    throw DimensionError("build_ls_cache: needs m >= d");
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  const Index d = a.cols();
  const VectorXd r_diag = qr.matrixR().diagonal().head(d).cwiseAbs();
  const double threshold = 1e-10 * a.norm();
  if (r_diag.minCoeff() <= threshold) {
    throw SingularMatrixError(
        "build_ls_cache: operator is rank deficient (pivot " +
        std::to_string(r_diag.minCoeff()) + " <= " +
        std::to_string(threshold) + ")");
  }
  // A P = Q1 R1  =>  A+ = P R1^{-1} Q1^T.
  MatrixXd q1 = qr.householderQ() * MatrixXd::Identity(a.rows(), d);
  MatrixXd rinv_q1t = qr.matrixR()
                          .topLeftCorner(d, d)
                          .triangularView<Eigen::Upper>()
                          .solve(q1.transpose());
  cache.pinv_ = qr.colsPermutation() * rinv_q1t;
  return cache;
}

VectorXd LsCache::solve(const VectorXd& r) const {
  if (r.size() != m_) {
    throw DimensionError("ls cache: rhs length mismatch");
  }
  if (structured_) {
    return inv_k_ * op_.apply_adjoint(r);
  }
  return pinv_ * r;
}

// ---------------------------------------------------------------------------
// ADMM for LAD

LadSolution solve_lad_admm(const SignedLadProblem& p, const LsCache& cache,
                           const AdmmConfig& cfg) {
  cfg.validate();
  const Index m = cache.rows();
  const Index d = cache.cols();
  check_problem(p, cache.fingerprint(), m, d);
  const MeasurementOperator& op = *p.op;
  const VectorXd& c = p.target;

  const double abs_tol = effective_tol(cfg.abs_tol, p.tolerance, m);
  const double rel_tol = effective_tol(cfg.rel_tol, p.tolerance, m);

  double rho = cfg.rho0;
  VectorXd x = p.warm_start ? *p.warm_start : VectorXd::Zero(d);
  VectorXd y = p.warm_start ? op.apply(x) : c;
  VectorXd phi = VectorXd::Zero(m);
  VectorXd ax(m), v(m), y_prev(m);

  LadSolution sol;
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  const double sqrt_d = std::sqrt(static_cast<double>(d));

  for (int t = 1; t <= cfg.max_iters; ++t) {
    x = cache.solve(y - phi / rho);
    ax = op.apply(x);
    v = ax + phi / rho - c;
    y_prev.swap(y);
    const double kappa = 1.0 / rho;
    y = c + v.unaryExpr([kappa](double z) {
          const double mag = std::abs(z) - kappa;
          return mag > 0.0 ? (z >= 0.0 ? mag : -mag) : 0.0;
        });
    phi += rho * (ax - y);

    if (!x.allFinite() || !y.allFinite()) {
      throw DivergenceError("solve_lad_admm: non-finite iterate");
    }

    const double r_norm = (ax - y).norm();
    const double s_norm = rho * (op.apply_adjoint(y - y_prev)).norm();
    const double eps_pri =
        sqrt_m * abs_tol + rel_tol * std::max(ax.norm(), y.norm());
    const double eps_dual =
        sqrt_d * abs_tol + rel_tol * op.apply_adjoint(phi).norm();

    if (cfg.record_trace) {
      sol.trace.push_back({t, (ax - c).lpNorm<1>() / static_cast<double>(m),
                           r_norm, s_norm, rho});
    }

    sol.iterations = t;
    sol.primal_residual = r_norm;
    sol.dual_residual = s_norm;
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      sol.status = SolveStatus::converged;
      break;
    }

    if (want_rho_adapt(cfg, t)) {
      if (r_norm > cfg.mu * s_norm) {
        rho = std::min(rho * cfg.tau_incr, 1e12);
      } else if (s_norm > cfg.mu * r_norm) {
        rho = std::max(rho / cfg.tau_decr, 1e-12);
      }
    }
  }

  sol.x = std::move(x);
  sol.objective = lad_objective(op, c, sol.x);
  return sol;
}

// ---------------------------------------------------------------------------
// LP cache and ADMM for the standard-form LP

LpCache build_lp_cache(const MeasurementOperator& op, Index m_cap) {
  const Index m = op.rows();
  if (m > m_cap) {
    throw std::length_error(
        "build_lp_cache: m = " + std::to_string(m) + " exceeds the cap " +
        std::to_string(m_cap) +
        " (the m x m Gram factorization costs O(m^3) time, O(m^2) memory); "
        "raise the cap explicitly to proceed");
  }
  LpCache cache;
  cache.m_ = m;
  cache.d_ = op.cols();
  cache.fingerprint_ = op.fingerprint();
  cache.a_ = op.materialize();
  MatrixXd g = cache.a_ * cache.a_.transpose();
  g.diagonal().array() += 1.0;
  cache.g_plus_i_.compute(g);
  if (cache.g_plus_i_.info() != Eigen::Success) {
    throw SingularMatrixError("build_lp_cache: Cholesky of (G + I) failed");
  }
  return cache;
}

VectorXd LpCache::apply_b(const VectorXd& w) const {
  const Index m = m_, d = d_;
  if (w.size() != d + 3 * m) {
    throw DimensionError("lp cache: lifted vector length mismatch");
  }
  const auto x = w.head(d);
  const auto t = w.segment(d, m);
  const auto u = w.segment(d + m, m);
  const auto s = w.segment(d + 2 * m, m);
  VectorXd ax = a_ * x;
  VectorXd out(2 * m);
  out.head(m) = ax - t + s;
  out.tail(m) = ax + t - u;
  return out;
}

VectorXd LpCache::apply_bt(const VectorXd& v) const {
  const Index m = m_, d = d_;
  if (v.size() != 2 * m) {
    throw DimensionError("lp cache: constraint vector length mismatch");
  }
  const auto v1 = v.head(m);
  const auto v2 = v.tail(m);
  VectorXd out(d + 3 * m);
  out.head(d) = a_.transpose() * (v1 + v2);
  out.segment(d, m) = v2 - v1;
  out.segment(d + m, m) = -v2;
  out.segment(d + 2 * m, m) = v1;
  return out;
}

VectorXd LpCache::solve_gram(const VectorXd& v) const {
  // (I + B B^T) = [[G+3I, G-I], [G-I, G+3I]] block-diagonalizes over the
  // symmetric/antisymmetric split: inverse acts as (1/2)(G+I)^{-1} on
  // v1 + v2 and as 1/4 on v1 - v2.
  const Index m = m_;
  const VectorXd sum = v.head(m) + v.tail(m);
  const VectorXd diff = v.head(m) - v.tail(m);
  const VectorXd solved = 0.5 * g_plus_i_.solve(sum);
  VectorXd out(2 * m);
  out.head(m) = 0.5 * (solved + 0.25 * diff);
  out.tail(m) = 0.5 * (solved - 0.25 * diff);
  return out;
}

VectorXd LpCache::solve_normal(const VectorXd& rhs) const {
  return rhs - apply_bt(solve_gram(apply_b(rhs)));
}

LadSolution solve_lad_lp_admm(const SignedLadProblem& p, const LpCache& cache,
                              const AdmmConfig& cfg) {
  cfg.validate();
  const Index m = cache.rows();
  const Index d = cache.cols();
  check_problem(p, cache.fingerprint(), m, d);
  const MeasurementOperator& op = *p.op;
  const VectorXd& c = p.target;
  const Index lifted = d + 3 * m;

  const double abs_tol = effective_tol(cfg.abs_tol, p.tolerance, m);
  const double rel_tol = effective_tol(cfg.rel_tol, p.tolerance, m);

  VectorXd c_lin = VectorXd::Zero(lifted);
  c_lin.segment(d, m).setOnes();
  VectorXd target2(2 * m);
  target2.head(m) = c;
  target2.tail(m) = c;
  const double target2_norm = target2.norm();

  // Feasible start: t = |Ax - c|, u = r + |r|, s = |r| - r with r = Ax - c.
  VectorXd w = VectorXd::Zero(lifted);
  if (p.warm_start) {
    const VectorXd r = op.apply(*p.warm_start) - c;
    w.head(d) = *p.warm_start;
    w.segment(d, m) = r.cwiseAbs();
    w.segment(d + m, m) = r.cwiseAbs() + r;
    w.segment(d + 2 * m, m) = r.cwiseAbs() - r;
  }
  VectorXd y = w;
  VectorXd lambda1 = VectorXd::Zero(2 * m);  // scaled dual of B w = p
  VectorXd lambda2 = VectorXd::Zero(lifted);  // scaled dual of w = y
  VectorXd y_prev(lifted), bw(2 * m);
  double rho = cfg.rho0;

  LadSolution sol;
  const double sqrt_pri = std::sqrt(static_cast<double>(2 * m + lifted));
  const double sqrt_dual = std::sqrt(static_cast<double>(lifted));

  for (int t = 1; t <= cfg.max_iters; ++t) {
    VectorXd rhs = cache.apply_bt(target2 - lambda1) + (y - lambda2) -
                   c_lin / rho;
    w = cache.solve_normal(rhs);
    y_prev.swap(y);
    y = w + lambda2;
    y.segment(d + m, 2 * m) = y.segment(d + m, 2 * m).cwiseMax(0.0);
    bw = cache.apply_b(w);
    lambda1 += bw - target2;
    lambda2 += w - y;

    if (!w.allFinite() || !y.allFinite()) {
      throw DivergenceError("solve_lad_lp_admm: non-finite iterate");
    }

    const double r_norm =
        std::sqrt((bw - target2).squaredNorm() + (w - y).squaredNorm());
    const double s_norm = rho * (y - y_prev).norm();
    const double eps_pri =
        sqrt_pri * abs_tol +
        rel_tol * std::max({std::sqrt(bw.squaredNorm() + w.squaredNorm()),
                            y.norm(), target2_norm});
    const double eps_dual =
        sqrt_dual * abs_tol +
        rel_tol * rho * (cache.apply_bt(lambda1) + lambda2).norm();

    if (cfg.record_trace) {
      sol.trace.push_back({t, lad_objective(op, c, w.head(d)), r_norm, s_norm,
                           rho});
    }

    sol.iterations = t;
    sol.primal_residual = r_norm;
    sol.dual_residual = s_norm;
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      sol.status = SolveStatus::converged;
      break;
    }

    if (want_rho_adapt(cfg, t)) {
      double factor = 1.0;
      if (r_norm > cfg.mu * s_norm) {
        factor = cfg.tau_incr;
      } else if (s_norm > cfg.mu * r_norm) {
        factor = 1.0 / cfg.tau_decr;
      }
      if (factor != 1.0) {
        const double new_rho = std::clamp(rho * factor, 1e-12, 1e12);
        // Scaled duals carry a 1/rho, so they shrink when rho grows.
        lambda1 *= rho / new_rho;
        lambda2 *= rho / new_rho;
        rho = new_rho;
      }
    }
  }

  sol.x = w.head(d);
  sol.objective = lad_objective(op, c, sol.x);
  return sol;
}

// ---------------------------------------------------------------------------
// Restarted subgradient

LadSolution solve_lad_subgradient(const SignedLadProblem& p,
                                  const RsgConfig& cfg) {
  cfg.validate();
  if (p.op == nullptr) {
    throw std::invalid_argument("lad solve: problem has no operator");
  }
  const MeasurementOperator& op = *p.op;
  const Index m = op.rows();
  const Index d = op.cols();
  if (p.target.size() != m) {
    throw DimensionError("lad solve: target length mismatch");
  }
  const VectorXd& c = p.target;
  const double m_real = static_cast<double>(m);

  VectorXd x = p.warm_start ? *p.warm_start : VectorXd::Zero(d);
  VectorXd residual = op.apply(x) - c;
  double objective = residual.lpNorm<1>() / m_real;

  LadSolution sol;
  sol.x = x;
  sol.objective = objective;
  sol.primal_residual = std::numeric_limits<double>::quiet_NaN();
  sol.dual_residual = std::numeric_limits<double>::quiet_NaN();

  const int period =
      cfg.restart_period > 0
          ? cfg.restart_period
          : 100 * static_cast<int>(std::ceil(std::log2(
                      std::max<double>(2.0, static_cast<double>(m)))));

  VectorXd sign_r = residual.unaryExpr([](double z) { return sign_pm(z); });
  VectorXd g = op.apply_adjoint(sign_r);
  double eta = cfg.eta0;
  if (eta <= 0.0) {
    // Polyak-type initial step assuming the optimum value is near zero:
    // ||step|| = m * f(x0) / ||g(x0)||. Falls back to a Frobenius-based
    // scale when the start is already stationary.
    const double g_sq = g.squaredNorm();
    if (objective > 0.0 && g_sq > 0.0) {
      eta = m_real * m_real * objective / g_sq;
    } else {
      eta = op.apply_adjoint(c).norm() /
            (m_real * std::max(op.squared_frobenius_norm(), 1.0));
      if (eta <= 0.0) eta = 1.0;
    }
  }

  const long total = static_cast<long>(cfg.epochs) * period;
  for (long t = 1; t <= total; ++t) {
    x -= (eta / m_real) * g;
    if (!x.allFinite()) {
      throw DivergenceError("solve_lad_subgradient: non-finite iterate");
    }
    residual = op.apply(x) - c;
    objective = residual.lpNorm<1>() / m_real;
    if (objective < sol.objective) {
      sol.objective = objective;
      sol.x = x;
    }
    if (t % period == 0) {
      // Stage boundary: restart from the incumbent and halve the step, so
      // the subsequence sampled every `period` iterations is the sequence
      // of stage seeds.
      eta *= 0.5;
      x = sol.x;
      residual = op.apply(x) - c;
      objective = sol.objective;
    }
    if (cfg.record_trace) {
      sol.trace.push_back({static_cast<int>(t), objective,
                           std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::quiet_NaN(), eta});
    }
    sign_r = residual.unaryExpr([](double z) { return sign_pm(z); });
    g = op.apply_adjoint(sign_r);
  }

  sol.iterations = static_cast<int>(total);
  // The objective itself certifies eps-suboptimality when m*f <= eps.
  sol.status = (sol.objective * m_real <= p.tolerance)
                   ? SolveStatus::converged
                   : SolveStatus::max_iters;
  return sol;
}

}  // namespace robustam
