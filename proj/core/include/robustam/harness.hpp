#pragma once

#include "robustam/image.hpp"
#include "robustam/measurement.hpp"
#include "robustam/robust_am.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

namespace robustam {

// Experiment protocols. Every trial derives its random streams from the
// master seed and the trial's coordinates, so results are identical for
// any parallelism level and are reduced in deterministic trial order.

enum class InitKind { spectral, oracle };

struct InitSpec {
  InitKind kind = InitKind::spectral;
  double oracle_radius = 0.05;  // fraction of ||x*||
  SpectralConfig spectral;
};

/// Runs fn(i) for i in [0, total) on `parallelism` worker threads (serially
/// when parallelism <= 1). fn must be safe to call concurrently for
/// distinct i. The first exception thrown by fn is rethrown after all
/// workers finish.
void parallel_for(std::size_t total, int parallelism,
                  const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Phase-transition grids

struct PhaseGridSpec {
  Index d = 100;
  std::vector<double> ratios;  // m/d values
  std::vector<double> etas;
  OutlierValueModel value_model = OutlierValueModel::zero;
  int n_operator_sets = 20;
  int n_signals_per_set = 30;
  double success_dist_tol = 1e-3;
  RobustAmConfig solver;  // dist_tol = 0 adopts success_dist_tol as the stop
  InitSpec init;
  std::uint64_t master_seed = 0;
};

struct PhaseGridCell {
  double m_over_d;
  double eta;
  double success_rate;
  int n_sets;
  int n_signals;
  int failures;  // trials that raised a solver error (counted as misses)
};

struct PhaseGrid {
  std::vector<double> ratios;
  std::vector<double> etas;
  std::vector<PhaseGridCell> cells;  // ratio-major, then eta

  const PhaseGridCell& cell(std::size_t ratio_idx, std::size_t eta_idx) const {
    return cells[ratio_idx * etas.size() + eta_idx];
  }
};

/// Success rule of the protocol: a measurement-vector set counts as a
/// success only when every signal under it was recovered. The rate is the
/// fraction of successful sets.
double all_signals_success_rate(
    const std::vector<std::vector<bool>>& per_set_signal_success);

PhaseGrid run_phase_grid(const PhaseGridSpec& spec, int parallelism);

// ---------------------------------------------------------------------------
// Convergence traces

struct ConvergenceSpec {
  Index d = 200;
  Index m = 1500;
  double eta = 0.1;
  OutlierValueModel value_model = OutlierValueModel::zero;
  int n_trials = 10;
  RobustAmConfig solver;
  InitSpec init;
  std::uint64_t master_seed = 0;
};

struct ConvergenceResult {
  std::vector<IterateTrace> traces;
  /// Per-iteration medians across trials; traces that stopped early are
  /// extended with their final row.
  IterateTrace median_trace;
};

ConvergenceResult run_convergence(const ConvergenceSpec& spec,
                                  int parallelism);

// ---------------------------------------------------------------------------
// Runtime comparison

struct RuntimeSpec {
  Index d = 100;
  Index m = 1000;
  double eta = 0.3;
  std::vector<OutlierValueModel> value_models;
  std::vector<InnerSolver> solvers;
  int n_trials = 5;
  double target_dist = 1e-5;
  RobustAmConfig solver;  // shared base configuration
  InitSpec init;
  std::uint64_t master_seed = 0;
};

struct RuntimeRow {
  InnerSolver solver;
  OutlierValueModel value_model;
  int trial;
  double cache_build_s;   // NaN when the cache build was rejected
  double time_to_tol_s;   // NaN when the target dist was not reached
  int outer_iters;
  int cache_builds;
  bool reached;
};

/// Wall-clock comparison. Runs serially by design: timings would not be
/// meaningful with trials contending for cores. Instance synthesis is not
/// timed; cache builds are reported in their own column.
std::vector<RuntimeRow> run_runtime_comparison(const RuntimeSpec& spec);

// ---------------------------------------------------------------------------
// Image pipeline (structured ensemble)

struct ImageExperimentSpec {
  std::filesystem::path image_dir;  // directory of PGM files
  bool use_synthetic = false;       // generate digit images instead
  int synthetic_count = 50;
  std::vector<int> ks;
  std::vector<double> etas;
  double success_rel_tol = 1e-3;  // success when dist <= tol * ||x*||
  RobustAmConfig solver;
  SpectralConfig spectral;
  std::uint64_t master_seed = 0;
};

struct ImageExperimentResult {
  PhaseGrid grid;  // the ratio axis holds k (= m/d for this ensemble)
  int images_used = 0;
  int skipped_unreadable = 0;
  int excluded_degenerate = 0;
  Index padded_length = 0;
};

ImageExperimentResult run_image_experiment(const ImageExperimentSpec& spec,
                                           int parallelism);

// ---------------------------------------------------------------------------
// Exports

/// Header: m_over_d,eta,success_rate,n_sets,n_signals,failures.
void export_phase_grid_csv(const PhaseGrid& grid, std::ostream& out);

/// Header: solver,value_model,trial,cache_build_s,time_to_tol_s,outer_iters.
void export_runtime_csv(const std::vector<RuntimeRow>& rows,
                        std::ostream& out);

/// Heatmap of cell success rates with labeled axes.
void export_phase_grid_svg(const PhaseGrid& grid, std::ostream& out,
                           const std::string& x_label = "m/d");

/// Semilog dist-vs-iteration lines, one per trace plus an emphasized
/// median; dist values are clamped at 1e-16 before taking logs.
void export_traces_svg(const std::vector<IterateTrace>& traces,
                       const IterateTrace& median_trace, std::ostream& out);

}  // namespace robustam
