#include "robustam/harness.hpp"

#include "robustam/format.hpp"
#include "robustam/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

namespace robustam {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  std::nth_element(values.begin(), values.begin() + n / 2, values.end());
  double med = values[n / 2];
  if (n % 2 == 0) {
    med = 0.5 * (med + *std::max_element(values.begin(),
                                         values.begin() + n / 2));
  }
  return med;
}

VectorXd make_init(const InitSpec& init, const ProblemInstance& inst,
                   std::uint64_t oracle_seed) {
  if (init.kind == InitKind::oracle) {
    return oracle_init(inst.x_star, init.oracle_radius, oracle_seed);
  }
  return spectral_init(inst, init.spectral).x0;
}

}  // namespace

void parallel_for(std::size_t total, int parallelism,
                  const std::function<void(std::size_t)>& fn) {
  if (total == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(std::max(parallelism, 1), total);
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= total) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double all_signals_success_rate(
    const std::vector<std::vector<bool>>& per_set_signal_success) {
  if (per_set_signal_success.empty()) return 0.0;
  int good_sets = 0;
  for (const auto& set : per_set_signal_success) {
    const bool all = std::all_of(set.begin(), set.end(),
                                 [](bool ok) { return ok; });
    if (all && !set.empty()) ++good_sets;
  }
  return static_cast<double>(good_sets) /
         static_cast<double>(per_set_signal_success.size());
}

// ---------------------------------------------------------------------------
// Phase grid

PhaseGrid run_phase_grid(const PhaseGridSpec& spec, int parallelism) {
  if (spec.ratios.empty() || spec.etas.empty()) {
    throw std::invalid_argument("phase grid: ratio and eta axes required");
  }
  if (spec.n_operator_sets < 1 || spec.n_signals_per_set < 1 || spec.d < 1 ||
      !(spec.success_dist_tol > 0.0)) {
    throw std::invalid_argument("phase grid: invalid counts or tolerance");
  }

  const std::size_t n_cells = spec.ratios.size() * spec.etas.size();
  const std::size_t sets = static_cast<std::size_t>(spec.n_operator_sets);
  const std::size_t signals = static_cast<std::size_t>(spec.n_signals_per_set);
  const std::size_t trials_per_cell = sets * signals;
  const std::size_t total = n_cells * trials_per_cell;

  // 0 = miss, 1 = success, 2 = solver error (also a miss).
  std::vector<std::uint8_t> outcome(total, 0);

  RobustAmConfig solver = spec.solver;
  if (solver.dist_tol == 0.0) solver.dist_tol = spec.success_dist_tol;

  parallel_for(total, parallelism, [&](std::size_t t) {
    const std::size_t cell = t / trials_per_cell;
    const std::size_t within = t % trials_per_cell;
    const std::size_t set = within / signals;
    const std::size_t signal = within % signals;
    const std::size_t ratio_idx = cell / spec.etas.size();
    const std::size_t eta_idx = cell % spec.etas.size();

    const double ratio = spec.ratios[ratio_idx];
    const double eta = spec.etas[eta_idx];
    const Index m = static_cast<Index>(
        std::llround(ratio * static_cast<double>(spec.d)));

    try {
      // One operator per (cell, set), shared by its signals.
      const std::uint64_t op_seed =
          derive_seed(spec.master_seed, "grid_op", cell, set);
      MeasurementOperator op = gaussian_ensemble(spec.d, m, op_seed);

      RngStream signal_rng = derive_stream(spec.master_seed, "grid_signal",
                                           cell, set, signal);
      const VectorXd x_star = signal_rng.normal_vector(spec.d);

      OutlierSpec outliers;
      outliers.fraction = eta;
      outliers.value_model = spec.value_model;
      ProblemInstance inst = synthesize_instance(
          std::move(op), x_star, outliers,
          derive_seed(spec.master_seed, "grid_instance", cell, set, signal));
      inst.seeds.master = spec.master_seed;
      inst.seeds.operator_seed = op_seed;
      inst.seeds.operator_from_seed = true;

      const VectorXd x0 = make_init(
          spec.init, inst,
          derive_seed(spec.master_seed, "grid_init", cell, set, signal));
      const RecoveryResult res = robust_am(inst, x0, solver);
      if (dist(res.x_hat, inst.x_star) <= spec.success_dist_tol) {
        outcome[t] = 1;
      }
    } catch (const std::exception&) {
      outcome[t] = 2;
    }
  });

  PhaseGrid grid;
  grid.ratios = spec.ratios;
  grid.etas = spec.etas;
  grid.cells.reserve(n_cells);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    std::vector<std::vector<bool>> per_set(sets,
                                           std::vector<bool>(signals, false));
    int failures = 0;
    for (std::size_t set = 0; set < sets; ++set) {
      for (std::size_t signal = 0; signal < signals; ++signal) {
        const std::uint8_t o =
            outcome[cell * trials_per_cell + set * signals + signal];
        per_set[set][signal] = (o == 1);
        if (o == 2) ++failures;
      }
    }
    grid.cells.push_back({spec.ratios[cell / spec.etas.size()],
                          spec.etas[cell % spec.etas.size()],
                          all_signals_success_rate(per_set),
                          spec.n_operator_sets, spec.n_signals_per_set,
                          failures});
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Convergence traces

ConvergenceResult run_convergence(const ConvergenceSpec& spec,
                                  int parallelism) {
  if (spec.n_trials < 1) {
    throw std::invalid_argument("convergence: need at least one trial");
  }
  RobustAmConfig solver = spec.solver;
  solver.record_trace = true;

  ConvergenceResult result;
  result.traces.resize(static_cast<std::size_t>(spec.n_trials));

  parallel_for(static_cast<std::size_t>(spec.n_trials), parallelism,
               [&](std::size_t trial) {
                 const std::uint64_t op_seed =
                     derive_seed(spec.master_seed, "conv_op", trial);
                 MeasurementOperator op =
                     gaussian_ensemble(spec.d, spec.m, op_seed);
                 RngStream signal_rng =
                     derive_stream(spec.master_seed, "conv_signal", trial);
                 const VectorXd x_star = signal_rng.normal_vector(spec.d);
                 OutlierSpec outliers;
                 outliers.fraction = spec.eta;
                 outliers.value_model = spec.value_model;
                 ProblemInstance inst = synthesize_instance(
                     std::move(op), x_star, outliers,
                     derive_seed(spec.master_seed, "conv_instance", trial));
                 inst.seeds.master = spec.master_seed;
                 inst.seeds.operator_seed = op_seed;
                 inst.seeds.operator_from_seed = true;

                 const VectorXd x0 = make_init(
                     spec.init, inst,
                     derive_seed(spec.master_seed, "conv_init", trial));
                 RecoveryResult res = robust_am(inst, x0, solver);
                 result.traces[trial] = std::move(*res.trace);
               });

  std::size_t max_len = 0;
  for (const auto& tr : result.traces) {
    max_len = std::max(max_len, tr.rows.size());
  }
  for (std::size_t k = 0; k < max_len; ++k) {
    std::vector<double> dists, objs, inners, walls;
    for (const auto& tr : result.traces) {
      const TraceRow& row =
          tr.rows[std::min(k, tr.rows.size() - 1)];  // hold final value
      dists.push_back(row.dist_to_truth);
      objs.push_back(row.lad_objective);
      inners.push_back(static_cast<double>(row.inner_iterations));
      walls.push_back(row.wall_time_s);
    }
    result.median_trace.rows.push_back(
        {static_cast<int>(k), median_of(dists), median_of(objs),
         static_cast<int>(std::lround(median_of(inners))),
         median_of(walls)});
  }
  return result;
}

// ---------------------------------------------------------------------------
// Runtime comparison

std::vector<RuntimeRow> run_runtime_comparison(const RuntimeSpec& spec) {
  if (spec.value_models.empty() || spec.solvers.empty() ||
      spec.n_trials < 1) {
    throw std::invalid_argument("runtime: models, solvers and trials needed");
  }
  std::vector<RuntimeRow> rows;
  for (const InnerSolver solver : spec.solvers) {
    for (std::size_t model_idx = 0; model_idx < spec.value_models.size();
         ++model_idx) {
      const OutlierValueModel model = spec.value_models[model_idx];
      for (int trial = 0; trial < spec.n_trials; ++trial) {
        // Same instance for every solver at a given (model, trial).
        const std::uint64_t op_seed =
            derive_seed(spec.master_seed, "rt_op", model_idx,
                        static_cast<std::uint64_t>(trial));
        MeasurementOperator op = gaussian_ensemble(spec.d, spec.m, op_seed);
        RngStream signal_rng =
            derive_stream(spec.master_seed, "rt_signal", model_idx,
                          static_cast<std::uint64_t>(trial));
        const VectorXd x_star = signal_rng.normal_vector(spec.d);
        OutlierSpec outliers;
        outliers.fraction = spec.eta;
        outliers.value_model = model;
        ProblemInstance inst = synthesize_instance(
            std::move(op), x_star, outliers,
            derive_seed(spec.master_seed, "rt_instance", model_idx,
                        static_cast<std::uint64_t>(trial)));
        inst.seeds.master = spec.master_seed;
        inst.seeds.operator_seed = op_seed;
        inst.seeds.operator_from_seed = true;

        RuntimeRow row{solver, model, trial, kNaN, kNaN, 0, 0, false};
        try {
          const VectorXd x0 = make_init(
              spec.init, inst,
              derive_seed(spec.master_seed, "rt_init", model_idx,
                          static_cast<std::uint64_t>(trial)));
          RobustAmConfig cfg = spec.solver;
          cfg.inner = solver;
          cfg.dist_tol = spec.target_dist;

          const auto start = Clock::now();
          const RecoveryResult res = robust_am(inst, x0, cfg);
          const double elapsed =
              std::chrono::duration<double>(Clock::now() - start).count();

          row.cache_build_s = res.cache_build_s;
          row.cache_builds = res.cache_builds;
          row.outer_iters = res.outer_iterations;
          row.reached = res.status == RecoveryStatus::success;
          if (row.reached) {
            row.time_to_tol_s = elapsed - res.cache_build_s;
          }
        } catch (const std::exception&) {
          // Rejected cache builds and solver failures leave a NaN row.
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Image experiment

ImageExperimentResult run_image_experiment(const ImageExperimentSpec& spec,
                                           int parallelism) {
  if (spec.ks.empty() || spec.etas.empty()) {
    throw std::invalid_argument("image experiment: k and eta axes required");
  }

  ImageExperimentResult result;

  std::vector<GrayImage> images;
  if (spec.use_synthetic) {
    images = synthetic_digit_images(
        spec.synthetic_count, derive_seed(spec.master_seed, "images"));
  } else {
    std::vector<std::filesystem::path> paths;
    for (const auto& entry :
         std::filesystem::directory_iterator(spec.image_dir)) {
      if (entry.path().extension() == ".pgm") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
      try {
        images.push_back(load_pgm(path));
      } catch (const IoError&) {
        ++result.skipped_unreadable;
      }
    }
  }

  Index n = 1;
  std::vector<VectorXd> vectors;
  for (const auto& img : images) {
    n = std::max(n, next_power_of_two(img.rows * img.cols));
  }
  for (const auto& img : images) {
    if (img.all_zero()) {
      ++result.excluded_degenerate;
      continue;
    }
    vectors.push_back(image_to_vector(img, n));
  }
  if (vectors.empty()) {
    throw std::invalid_argument("image experiment: no usable images");
  }
  result.images_used = static_cast<int>(vectors.size());
  result.padded_length = n;

  const std::size_t n_cells = spec.ks.size() * spec.etas.size();
  const std::size_t per_cell = vectors.size();
  const std::size_t total = n_cells * per_cell;
  std::vector<std::uint8_t> outcome(total, 0);

  parallel_for(total, parallelism, [&](std::size_t t) {
    const std::size_t cell = t / per_cell;
    const std::size_t image = t % per_cell;
    const std::size_t k_idx = cell / spec.etas.size();
    const std::size_t eta_idx = cell % spec.etas.size();
    const int k = spec.ks[k_idx];
    const double eta = spec.etas[eta_idx];

    try {
      const std::uint64_t op_seed =
          derive_seed(spec.master_seed, "img_op", cell, image);
      MeasurementOperator op = hadamard_ensemble(n, k, op_seed);
      OutlierSpec outliers;
      outliers.fraction = eta;
      outliers.value_model = OutlierValueModel::zero;
      ProblemInstance inst = synthesize_instance(
          std::move(op), vectors[image], outliers,
          derive_seed(spec.master_seed, "img_instance", cell, image));
      inst.seeds.master = spec.master_seed;
      inst.seeds.operator_seed = op_seed;
      inst.seeds.operator_from_seed = true;

      const double tol = spec.success_rel_tol * inst.x_star.norm();
      RobustAmConfig cfg = spec.solver;
      cfg.dist_tol = tol;
      const VectorXd x0 = spectral_init(inst, spec.spectral).x0;
      const RecoveryResult res = robust_am(inst, x0, cfg);
      if (dist(res.x_hat, inst.x_star) <= tol) outcome[t] = 1;
    } catch (const std::exception&) {
      outcome[t] = 2;
    }
  });

  result.grid.ratios.assign(spec.ks.begin(), spec.ks.end());
  result.grid.etas = spec.etas;
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    int successes = 0, failures = 0;
    for (std::size_t image = 0; image < per_cell; ++image) {
      const std::uint8_t o = outcome[cell * per_cell + image];
      if (o == 1) ++successes;
      if (o == 2) ++failures;
    }
    result.grid.cells.push_back(
        {static_cast<double>(spec.ks[cell / spec.etas.size()]),
         spec.etas[cell % spec.etas.size()],
         static_cast<double>(successes) / static_cast<double>(per_cell),
         static_cast<int>(per_cell), 1, failures});
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV exports

void export_phase_grid_csv(const PhaseGrid& grid, std::ostream& out) {
  out << "m_over_d,eta,success_rate,n_sets,n_signals,failures\n";
  for (const PhaseGridCell& cell : grid.cells) {
    out << fmt_double(cell.m_over_d) << ',' << fmt_double(cell.eta) << ','
        << fmt_double(cell.success_rate) << ',' << cell.n_sets << ','
        << cell.n_signals << ',' << cell.failures << '\n';
  }
}

void export_runtime_csv(const std::vector<RuntimeRow>& rows,
                        std::ostream& out) {
  out << "solver,value_model,trial,cache_build_s,time_to_tol_s,outer_iters\n";
  for (const RuntimeRow& row : rows) {
    out << to_string(row.solver) << ',' << to_string(row.value_model) << ','
        << row.trial << ',' << fmt_double(row.cache_build_s) << ','
        << fmt_double(row.time_to_tol_s) << ',' << row.outer_iters << '\n';
  }
}

}  // namespace robustam
