#include "cli_app.hpp"

#include "robustam/format.hpp"
#include "robustam/harness.hpp"
#include "robustam/instance_io.hpp"
#include "robustam/theory.hpp"
#include "robustam/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace robustam::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// "a,b,c" or "start:stop:step" (inclusive endpoints, step > 0).
std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double start = 0, stop = 0, step = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
        step <= 0 || stop < start) {
      throw CLI::ValidationError("range", "expected start:stop:step with "
                                          "positive step, got '" + text + "'");
    }
    const auto count =
        static_cast<long>(std::floor((stop - start) / step + 0.5)) + 1;
    for (long i = 0; i < count; ++i) {
      double v = start + static_cast<double>(i) * step;
      // Snap the endpoint so accumulation drift cannot overshoot it.
      if (std::abs(v - stop) <= 1e-9 * std::max(1.0, std::abs(stop))) {
        v = stop;
      }
      out.push_back(v);
    }
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) {
    throw CLI::ValidationError("range", "no values in '" + text + "'");
  }
  return out;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << content;
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

fs::path prepare_out_dir(const std::string& dir) {
  if (dir.empty()) {
    throw std::invalid_argument("--out directory is required");
  }
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) {
    throw IoError("cannot create output directory " + dir);
  }
  return p;
}

// Options shared by the experiment subcommands.
struct Common {
  std::uint64_t seed = 0;
  std::string out;
  int parallelism = 1;
  std::string dump_config;
};

struct SolverOpts {
  std::string inner = "admm_lad";
  int max_outer = 50;
  double dist_tol = 1e-5;
  double change_tol = 1e-10;
  double inner_eps = -1.0;
  bool fixed_eps = false;
  double admm_abs_tol = 1e-8;
  double admm_rel_tol = 1e-8;
  int admm_max_iters = 2500;
  double rho0 = 1.0;
  bool no_vary_rho = false;
  Index lp_m_cap = 2048;
  int rsg_period = 0;
  int rsg_epochs = 20;
  std::string init = "spectral";
  double oracle_radius = 0.05;
  double spectral_gamma = 3.0;
  int spectral_power_iters = 200;
};

void add_solver_options(CLI::App* cmd, SolverOpts& s) {
  cmd->add_option("--solver", s.inner, "Inner solver")
      ->check(CLI::IsMember({"admm_lad", "admm_lp", "subgradient"}));
  cmd->add_option("--max-outer", s.max_outer, "Outer iteration cap");
  cmd->add_option("--dist-tol", s.dist_tol,
                  "Benchmark stop on dist to the ground truth (0 disables)");
  cmd->add_option("--change-tol", s.change_tol,
                  "Relative iterate-change stop");
  cmd->add_option("--inner-eps", s.inner_eps,
                  "Inner sub-optimality budget floor (<0: 1e-8*m)");
  cmd->add_flag("--fixed-eps", s.fixed_eps,
                "Keep the inner budget fixed instead of the geometric "
                "warm-up schedule");
  cmd->add_option("--admm-abs-tol", s.admm_abs_tol, "ADMM absolute tolerance");
  cmd->add_option("--admm-rel-tol", s.admm_rel_tol, "ADMM relative tolerance");
  cmd->add_option("--admm-max-iters", s.admm_max_iters,
                  "ADMM inner iteration cap");
  cmd->add_option("--rho0", s.rho0, "Initial ADMM penalty");
  cmd->add_flag("--no-vary-rho", s.no_vary_rho,
                "Disable residual balancing of the penalty");
  cmd->add_option("--lp-m-cap", s.lp_m_cap,
                  "Row cap for the LP cache factorization");
  cmd->add_option("--rsg-period", s.rsg_period,
                  "Subgradient restart period (0: auto)");
  cmd->add_option("--rsg-epochs", s.rsg_epochs, "Subgradient halving count");
  cmd->add_option("--init", s.init, "Initialization")
      ->check(CLI::IsMember({"spectral", "oracle"}));
  cmd->add_option("--oracle-radius", s.oracle_radius,
                  "Oracle init radius as a fraction of ||x*||");
  cmd->add_option("--spectral-gamma", s.spectral_gamma,
                  "Spectral truncation factor");
  cmd->add_option("--spectral-power-iters", s.spectral_power_iters,
                  "Power iteration cap");
}

RobustAmConfig to_config(const SolverOpts& s) {
  RobustAmConfig cfg;
  const auto inner = inner_solver_from_string(s.inner);
  if (!inner) {
    throw std::invalid_argument("unknown solver '" + s.inner + "'");
  }
  cfg.inner = *inner;
  cfg.max_outer = s.max_outer;
  cfg.dist_tol = s.dist_tol;
  cfg.change_tol = s.change_tol;
  cfg.inner_epsilon = s.inner_eps;
  cfg.auto_epsilon_schedule = !s.fixed_eps;
  cfg.admm.abs_tol = s.admm_abs_tol;
  cfg.admm.rel_tol = s.admm_rel_tol;
  cfg.admm.max_iters = s.admm_max_iters;
  cfg.admm.rho0 = s.rho0;
  cfg.admm.vary_rho = !s.no_vary_rho;
  cfg.lp_m_cap = s.lp_m_cap;
  cfg.rsg.restart_period = s.rsg_period;
  cfg.rsg.epochs = s.rsg_epochs;
  return cfg;
}

InitSpec to_init(const SolverOpts& s) {
  InitSpec init;
  init.kind = s.init == "oracle" ? InitKind::oracle : InitKind::spectral;
  init.oracle_radius = s.oracle_radius;
  init.spectral.truncation_factor = s.spectral_gamma;
  init.spectral.power_iters = s.spectral_power_iters;
  return init;
}

OutlierValueModel parse_model(const std::string& name) {
  const auto model = outlier_model_from_string(name);
  if (!model) {
    throw std::invalid_argument("unknown outlier model '" + name + "'");
  }
  return *model;
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const Common& common, const std::string& config_echo,
                    const std::string& started, json extra = {}) {
  json manifest;
  manifest["subcommand"] = subcommand;
  manifest["version"] = kVersion;
  manifest["master_seed"] = common.seed;
  manifest["parallelism"] = common.parallelism;
  manifest["started"] = started;
  manifest["finished"] = iso_timestamp();
  manifest["config"] = config_echo;
  manifest["image_pixel_scaling"] =
      "pgm pixel value / maxval, in [0,1]";  // recorded convention
  if (!extra.is_null()) manifest["results"] = extra;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Subcommand payloads

struct SolveOpts {
  Index d = 200;
  Index m = 2000;
  double eta = 0.3;
  std::string model = "zero";
  std::string instance_path;
  std::string dump_instance;
  SolverOpts solver;
};

int cmd_solve(const Common& common, const SolveOpts& opts,
              const std::string& config_echo) {
  const std::string started = iso_timestamp();
  ProblemInstance inst;
  if (!opts.instance_path.empty()) {
    inst = load_instance(opts.instance_path);
  } else {
    const std::uint64_t op_seed = derive_seed(common.seed, "solve_op");
    auto op = gaussian_ensemble(opts.d, opts.m, op_seed);
    RngStream rng = derive_stream(common.seed, "solve_signal");
    const VectorXd x_star = rng.normal_vector(opts.d);
    OutlierSpec outliers;
    outliers.fraction = opts.eta;
    outliers.value_model = parse_model(opts.model);
    inst = synthesize_instance(std::move(op), x_star, outliers,
                               derive_seed(common.seed, "solve_instance"));
    inst.seeds.master = common.seed;
    inst.seeds.operator_seed = op_seed;
    inst.seeds.operator_from_seed = true;
  }
  if (!opts.dump_instance.empty()) {
    save_instance(inst, opts.dump_instance);
  }

  RobustAmConfig cfg = to_config(opts.solver);
  cfg.record_trace = true;
  const InitSpec init = to_init(opts.solver);
  VectorXd x0;
  if (init.kind == InitKind::oracle) {
    x0 = oracle_init(inst.x_star, init.oracle_radius,
                     derive_seed(common.seed, "solve_init"));
  } else {
    x0 = spectral_init(inst, init.spectral).x0;
  }
  const RecoveryResult res = robust_am(inst, x0, cfg);

  const double final_dist =
      inst.x_star.size() > 0 ? dist(res.x_hat, inst.x_star)
                             : std::numeric_limits<double>::quiet_NaN();
  const VectorXd c = signed_targets(inst.op, inst.b, res.x_hat);
  std::cout << "dist " << fmt_double(final_dist) << "\n"
            << "objective " << fmt_double(lad_objective(inst.op, c, res.x_hat))
            << "\n"
            << "status " << to_string(res.status) << "\n"
            << "outer_iterations " << res.outer_iterations << "\n"
            << "cache_builds " << res.cache_builds << "\n";

  if (!common.out.empty()) {
    const fs::path dir = prepare_out_dir(common.out);
    std::ostringstream trace;
    export_trace_csv(*res.trace, trace);
    write_file(dir / "trace.csv", trace.str());
    write_manifest(dir, "solve", common, config_echo, started,
                   json{{"dist", final_dist},
                        {"status", to_string(res.status)},
                        {"outer_iterations", res.outer_iterations}});
  }
  return 0;
}

struct GridOpts {
  Index d = 50;
  std::string ratios = "2,4,6,8,10,12";
  std::string etas = "0,0.1,0.2,0.3";
  std::string model = "zero";
  int sets = 10;
  int signals = 10;
  double tol = 1e-3;
  SolverOpts solver;
};

int cmd_phase_grid(const Common& common, const GridOpts& opts,
                   const std::string& config_echo) {
  const std::string started = iso_timestamp();
  const fs::path dir = prepare_out_dir(common.out);

  PhaseGridSpec spec;
  spec.d = opts.d;
  spec.ratios = parse_values(opts.ratios);
  spec.etas = parse_values(opts.etas);
  spec.value_model = parse_model(opts.model);
  spec.n_operator_sets = opts.sets;
  spec.n_signals_per_set = opts.signals;
  spec.success_dist_tol = opts.tol;
  spec.solver = to_config(opts.solver);
  spec.init = to_init(opts.solver);
  spec.master_seed = common.seed;

  const PhaseGrid grid = run_phase_grid(spec, common.parallelism);

  std::ostringstream csv;
  export_phase_grid_csv(grid, csv);
  write_file(dir / "phase_grid.csv", csv.str());
  std::ostringstream svg;
  export_phase_grid_svg(grid, svg);
  write_file(dir / "phase_grid.svg", svg.str());
  write_manifest(dir, "phase-grid", common, config_echo, started);
  std::cout << "wrote " << (dir / "phase_grid.csv").string() << "\n";
  return 0;
}

struct ConvergeOpts {
  Index d = 200;
  Index m = 1500;
  double eta = 0.1;
  std::string model = "zero";
  int trials = 10;
  SolverOpts solver;
};

int cmd_converge(const Common& common, const ConvergeOpts& opts,
                 const std::string& config_echo) {
  const std::string started = iso_timestamp();
  const fs::path dir = prepare_out_dir(common.out);

  ConvergenceSpec spec;
  spec.d = opts.d;
  spec.m = opts.m;
  spec.eta = opts.eta;
  spec.value_model = parse_model(opts.model);
  spec.n_trials = opts.trials;
  spec.solver = to_config(opts.solver);
  spec.init = to_init(opts.solver);
  spec.master_seed = common.seed;

  const ConvergenceResult result = run_convergence(spec, common.parallelism);
  for (std::size_t t = 0; t < result.traces.size(); ++t) {
    std::ostringstream csv;
    export_trace_csv(result.traces[t], csv);
    write_file(dir / ("trace_trial" + std::to_string(t) + ".csv"), csv.str());
  }
  std::ostringstream median_csv;
  export_trace_csv(result.median_trace, median_csv);
  write_file(dir / "trace_median.csv", median_csv.str());
  std::ostringstream svg;
  export_traces_svg(result.traces, result.median_trace, svg);
  write_file(dir / "traces.svg", svg.str());
  write_manifest(dir, "converge", common, config_echo, started);
  std::cout << "wrote " << (dir / "trace_median.csv").string() << "\n";
  return 0;
}

struct RuntimeOpts {
  Index d = 100;
  Index m = 1000;
  double eta = 0.3;
  std::string models = "zero,cauchy";
  std::string solvers = "admm_lad,admm_lp,subgradient";
  int trials = 3;
  double target = 1e-5;
  SolverOpts solver;
};

int cmd_runtime(const Common& common, const RuntimeOpts& opts,
                const std::string& config_echo) {
  const std::string started = iso_timestamp();
  const fs::path dir = prepare_out_dir(common.out);

  RuntimeSpec spec;
  spec.d = opts.d;
  spec.m = opts.m;
  spec.eta = opts.eta;
  std::stringstream models(opts.models);
  std::string item;
  while (std::getline(models, item, ',')) {
    if (!item.empty()) spec.value_models.push_back(parse_model(item));
  }
  std::stringstream solvers(opts.solvers);
  while (std::getline(solvers, item, ',')) {
    if (item.empty()) continue;
    const auto solver = inner_solver_from_string(item);
    if (!solver) throw std::invalid_argument("unknown solver '" + item + "'");
    spec.solvers.push_back(*solver);
  }
  spec.n_trials = opts.trials;
  spec.target_dist = opts.target;
  spec.solver = to_config(opts.solver);
  spec.init = to_init(opts.solver);
  spec.master_seed = common.seed;

  const auto rows = run_runtime_comparison(spec);
  std::ostringstream csv;
  export_runtime_csv(rows, csv);
  write_file(dir / "runtime.csv", csv.str());
  write_manifest(dir, "runtime", common, config_echo, started);
  std::cout << csv.str();
  return 0;
}

struct ImageOpts {
  std::string image_dir;
  int synthetic = 50;
  std::string write_images;
  std::string ks = "1,2,3,4,5,6,7,8,9,10,11,12";
  std::string etas = "0,0.1,0.2,0.3,0.4";
  double tol_rel = 1e-3;
  SolverOpts solver;
};

int cmd_image(const Common& common, const ImageOpts& opts,
              const std::string& config_echo) {
  const std::string started = iso_timestamp();
  const fs::path dir = prepare_out_dir(common.out);

  if (!opts.write_images.empty()) {
    const fs::path img_dir = prepare_out_dir(opts.write_images);
    const auto images = synthetic_digit_images(
        opts.synthetic, derive_seed(common.seed, "images"));
    for (std::size_t i = 0; i < images.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "digit_%03zu.pgm", i);
      save_pgm(images[i], img_dir / name);
    }
    std::cout << "wrote " << images.size() << " synthetic images to "
              << img_dir.string() << "\n";
  }

  ImageExperimentSpec spec;
  spec.image_dir = opts.image_dir;
  spec.use_synthetic = opts.image_dir.empty();
  spec.synthetic_count = opts.synthetic;
  for (double k : parse_values(opts.ks)) {
    spec.ks.push_back(static_cast<int>(std::llround(k)));
  }
  spec.etas = parse_values(opts.etas);
  spec.success_rel_tol = opts.tol_rel;
  spec.solver = to_config(opts.solver);
  spec.spectral = to_init(opts.solver).spectral;
  spec.master_seed = common.seed;

  const auto result = run_image_experiment(spec, common.parallelism);
  std::ostringstream csv;
  export_phase_grid_csv(result.grid, csv);
  write_file(dir / "image_grid.csv", csv.str());
  std::ostringstream svg;
  export_phase_grid_svg(result.grid, svg, "k");
  write_file(dir / "image_grid.svg", svg.str());
  write_manifest(dir, "image", common, config_echo, started,
                 json{{"images_used", result.images_used},
                      {"skipped_unreadable", result.skipped_unreadable},
                      {"excluded_degenerate", result.excluded_degenerate},
                      {"padded_length", result.padded_length}});
  std::cout << "wrote " << (dir / "image_grid.csv").string() << "\n";
  return 0;
}

struct TheoryOpts {
  std::string etas = "0:0.25:0.01";
  std::string out;
};

int cmd_theory(const Common& common, const TheoryOpts& opts,
               const std::string& config_echo) {
  const std::string started = iso_timestamp();
  std::ostringstream csv;
  csv << "eta,c0,C_eta,nu_eta,lambda_eta\n";
  for (double eta : parse_values(opts.etas)) {
    const RateConstants rc = rate_constants(eta);
    csv << fmt_double(rc.eta) << ',' << fmt_double(rc.c0) << ','
        << fmt_double(rc.C_eta) << ',' << fmt_double(rc.nu_eta) << ','
        << fmt_double(rc.lambda_eta) << '\n';
  }
  fs::path target(opts.out.empty() ? common.out : opts.out);
  if (target.empty()) {
    std::cout << csv.str();
    return 0;
  }
  if (target.extension() == ".csv") {
    if (target.has_parent_path()) {
      fs::create_directories(target.parent_path());
    }
    write_file(target, csv.str());
  } else {
    const fs::path dir = prepare_out_dir(target.string());
    write_file(dir / "theory_rates.csv", csv.str());
    write_manifest(dir, "theory", common, config_echo, started);
    target = dir / "theory_rates.csv";
  }
  std::cout << "wrote " << target.string() << "\n";
  return 0;
}

// Small independent LAD optimum for the selftest: enumerate d-row subsets.
double selftest_oracle(const MatrixXd& a, const VectorXd& c) {
  const Index m = a.rows(), d = a.cols();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> idx(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    MatrixXd sub(d, d);
    VectorXd rhs(d);
    for (Index r = 0; r < d; ++r) {
      sub.row(r) = a.row(idx[static_cast<std::size_t>(r)]);
      rhs[r] = c[idx[static_cast<std::size_t>(r)]];
    }
    const Eigen::FullPivLU<MatrixXd> lu(sub);
    if (lu.isInvertible()) {
      const VectorXd x = lu.solve(rhs);
      best = std::min(best,
                      (a * x - c).lpNorm<1>() / static_cast<double>(m));
    }
    Index pos = d - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - d + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (Index i = pos + 1; i < d; ++i) {
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return best;
}

int cmd_selftest(const Common& common) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok) {
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  // Oracle equivalence on small seeded instances.
  struct Shape { Index m, d; };
  int idx = 0;
  for (const Shape shape : {Shape{8, 2}, Shape{7, 3}}) {
    for (int rep = 0; rep < 6; ++rep, ++idx) {
      const auto op = gaussian_ensemble(shape.d, shape.m,
                                        derive_seed(common.seed, "st", idx));
      RngStream rng = derive_stream(common.seed, "st_target", idx);
      const VectorXd c = rng.unit_vector(shape.m);
      const double opt = selftest_oracle(op.matrix(), c);

      SignedLadProblem p;
      p.op = &op;
      p.target = c;
      p.tolerance = 1e-10;
      const auto lad = solve_lad_admm(p, build_ls_cache(op), {});
      AdmmConfig lp_cfg;
      lp_cfg.max_iters = 50000;
      const auto lp = solve_lad_lp_admm(p, build_lp_cache(op), lp_cfg);
      RsgConfig rsg_cfg;
      rsg_cfg.restart_period = 200;
      rsg_cfg.epochs = 20;
      const auto rsg = solve_lad_subgradient(p, rsg_cfg);

      report("oracle[" + std::to_string(idx) + "] admm_lad",
             std::abs(lad.objective - opt) <= 1e-6);
      report("oracle[" + std::to_string(idx) + "] admm_lp",
             std::abs(lp.objective - opt) <= 1e-4);
      report("oracle[" + std::to_string(idx) + "] subgradient",
             std::abs(rsg.objective - opt) <= 1e-3);
    }
  }

  // Rate constants: closed form vs an inline re-derivation.
  {
    const auto rc = rate_constants(0.0);
    const double pi = std::numbers::pi;
    const double c0 = (4.0 / (25.0 * pi)) *
                          (std::sqrt(2.0 / pi) +
                           std::sqrt(2.0 * std::log(25.0 * std::numbers::e *
                                                    pi / 4.0))) +
                      1.0 / (625.0 * std::sqrt(pi));
    const double c_eta = std::sqrt(2.0 / pi) - c0 - 1.0 / 250.0;
    report("theory nu0 re-derivation",
           std::abs(rc.nu_eta - c0 / c_eta) <= 1e-10);
    report("theory nu(1/4) < 9/10", rate_constants(0.25).nu_eta < 0.9);
    bool monotone = true;
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
      const double nu = rate_constants(0.25 * i / 100.0).nu_eta;
      if (nu <= prev) monotone = false;
      prev = nu;
    }
    report("theory nu monotone", monotone);
  }

  // Wedge probability at a right-angle quarter.
  {
    VectorXd x(2), z(2);
    x << 1, 0;
    z << std::numbers::inv_sqrt3, 0;  // placeholder, replaced below
    z << 1, 1;
    z /= z.norm();  // 45 degrees
    const double est = wedge_probability_mc(x, z, 20000,
                                            derive_seed(common.seed, "wedge"));
    const double sigma = std::sqrt(0.25 * 0.75 / 20000.0);
    report("wedge probability 45deg", std::abs(est - 0.25) <= 3.0 * sigma);
  }

  std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED")
            << "\n";
  return failures == 0 ? 0 : 4;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"robustam: least-absolute-deviation phase retrieval by "
               "alternating minimization"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a config file");
  app.fallthrough();
  // Defaults are captured so --dump-config emits a complete, reparseable
  // configuration.
  app.option_defaults()->always_capture_default(true);

  Common common;
  app.add_option("--seed", common.seed, "Master seed");
  app.add_option("--out", common.out, "Output directory");
  app.add_option("--parallelism", common.parallelism, "Worker threads")
      ->envname("ROBUSTAM_PARALLELISM");
  app.add_option("--dump-config", common.dump_config,
                 "Write the parsed configuration to a file and continue");

  SolveOpts solve;
  auto* solve_cmd = app.add_subcommand("solve", "Run one instance end to end");
  solve_cmd->configurable();
  solve_cmd->add_option("--d", solve.d, "Signal dimension");
  solve_cmd->add_option("--m", solve.m, "Measurement count");
  solve_cmd->add_option("--eta", solve.eta, "Outlier fraction");
  solve_cmd->add_option("--model", solve.model, "Outlier value model")
      ->check(CLI::IsMember({"zero", "cauchy", "uniform"}));
  solve_cmd->add_option("--instance", solve.instance_path,
                        "Load a saved instance instead of synthesizing");
  solve_cmd->add_option("--dump-instance", solve.dump_instance,
                        "Save the synthesized instance to this file");
  add_solver_options(solve_cmd, solve.solver);

  GridOpts grid;
  auto* grid_cmd =
      app.add_subcommand("phase-grid", "Monte-Carlo phase transition grid");
  grid_cmd->configurable();
  grid_cmd->add_option("--d", grid.d, "Signal dimension");
  grid_cmd->add_option("--ratios", grid.ratios, "m/d values (list or range)");
  grid_cmd->add_option("--etas", grid.etas, "Outlier fractions");
  grid_cmd->add_option("--model", grid.model, "Outlier value model");
  grid_cmd->add_option("--sets", grid.sets, "Measurement-operator sets");
  grid_cmd->add_option("--signals", grid.signals, "Ground truths per set");
  grid_cmd->add_option("--tol", grid.tol, "Success threshold on dist");
  add_solver_options(grid_cmd, grid.solver);

  ConvergeOpts conv;
  auto* conv_cmd =
      app.add_subcommand("converge", "Convergence traces and their median");
  conv_cmd->configurable();
  conv_cmd->add_option("--d", conv.d, "Signal dimension");
  conv_cmd->add_option("--m", conv.m, "Measurement count");
  conv_cmd->add_option("--eta", conv.eta, "Outlier fraction");
  conv_cmd->add_option("--model", conv.model, "Outlier value model");
  conv_cmd->add_option("--trials", conv.trials, "Independent trials");
  add_solver_options(conv_cmd, conv.solver);

  RuntimeOpts rt;
  auto* rt_cmd =
      app.add_subcommand("runtime", "Wall-clock solver comparison");
  rt_cmd->configurable();
  rt_cmd->add_option("--d", rt.d, "Signal dimension");
  rt_cmd->add_option("--m", rt.m, "Measurement count");
  rt_cmd->add_option("--eta", rt.eta, "Outlier fraction");
  rt_cmd->add_option("--models", rt.models, "Outlier models (comma list)");
  rt_cmd->add_option("--solvers", rt.solvers, "Solvers (comma list)");
  rt_cmd->add_option("--trials", rt.trials, "Trials per cell");
  rt_cmd->add_option("--target", rt.target, "dist target for time-to-tol");
  add_solver_options(rt_cmd, rt.solver);

  ImageOpts img;
  auto* img_cmd = app.add_subcommand(
      "image", "Structured-ensemble phase transitions on images");
  img_cmd->configurable();
  img_cmd->add_option("--dir", img.image_dir, "Directory of PGM images");
  img_cmd->add_option("--synthetic", img.synthetic,
                      "Synthetic digit count when no --dir is given");
  img_cmd->add_option("--write-images", img.write_images,
                      "Also write the synthetic images to this directory");
  img_cmd->add_option("--ks", img.ks, "Modulation counts");
  img_cmd->add_option("--etas", img.etas, "Outlier fractions");
  img_cmd->add_option("--tol-rel", img.tol_rel,
                      "Success threshold relative to ||x*||");
  add_solver_options(img_cmd, img.solver);

  TheoryOpts theory;
  auto* theory_cmd =
      app.add_subcommand("theory", "Rate-constant table for eta sweeps");
  theory_cmd->configurable();
  theory_cmd->add_option("--etas", theory.etas, "Eta values (list or range)");
  theory_cmd->add_option("--out", theory.out,
                         "CSV file (or directory) to write");

  auto* selftest_cmd = app.add_subcommand(
      "selftest", "Oracle-equivalence and theory-constant checks");
  selftest_cmd->configurable();

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!common.dump_config.empty()) {
      write_file(common.dump_config, app.config_to_str(true, true));
    }
    const std::string config_echo = app.config_to_str(true, false);
    if (solve_cmd->parsed()) return cmd_solve(common, solve, config_echo);
    if (grid_cmd->parsed()) return cmd_phase_grid(common, grid, config_echo);
    if (conv_cmd->parsed()) return cmd_converge(common, conv, config_echo);
    if (rt_cmd->parsed()) return cmd_runtime(common, rt, config_echo);
    if (img_cmd->parsed()) return cmd_image(common, img, config_echo);
    if (theory_cmd->parsed()) return cmd_theory(common, theory, config_echo);
    if (selftest_cmd->parsed()) return cmd_selftest(common);
    std::cerr << "error: code=2 message=\"no subcommand\"\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: code=3 message=\"" << e.what() << "\"\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: code=3 message=\"" << e.what() << "\"\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: code=2 message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: code=4 message=\"" << e.what() << "\"\n";
    return 4;
  }
}

}  // namespace robustam::cli
