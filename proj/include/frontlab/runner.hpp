#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "frontlab/classify.hpp"
#include "frontlab/config.hpp"
#include "frontlab/csv.hpp"
#include "frontlab/eigen.hpp"
#include "frontlab/errors.hpp"
#include "frontlab/front_solver.hpp"
#include "frontlab/steady.hpp"
#include "frontlab/weak_form.hpp"

#ifndef FRONTLAB_VERSION
#define FRONTLAB_VERSION "dev"
#endif

namespace frontlab {

struct RunOptions {
  std::string subcommand;
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  bool seedless = false;  // asserts the run uses no randomness (none ever does)
  bool verbose = false;
};

struct RunRecord {
  int exit_code = 0;
  std::string config_digest;
  std::vector<std::string> files;  // artifact paths relative to out_dir
  std::string status = "ok";
  std::string message;
  long wall_ms = 0;
};

namespace detail {

class OutputSink {
 public:
  explicit OutputSink(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::string path(const std::string& name) {
    files_.push_back(name);
    return dir_ + "/" + name;
  }

  std::ofstream open(const std::string& name) {
    std::ofstream out(path(name));
    if (!out) throw std::runtime_error("cannot open output file " + name);
    return out;
  }

  const std::vector<std::string>& files() const { return files_; }
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double exp_number(const RunConfig& cfg, const char* key, double fallback) {
  auto it = cfg.experiment.find(key);
  if (it == cfg.experiment.end()) return fallback;
  if (!it->second.is_number())
    throw ConfigError(std::string("experiment.") + key + ": expected a number");
  return it->second.number();
}

inline std::vector<double> exp_array(const RunConfig& cfg, const char* key) {
  auto it = cfg.experiment.find(key);
  if (it == cfg.experiment.end()) return {};
  if (!it->second.is_array())
    throw ConfigError(std::string("experiment.") + key + ": expected an array");
  return it->second.array();
}

inline void write_plot_script(OutputSink& sink, const std::string& csv,
                              const std::string& xcol, const std::string& ycols) {
  auto out = sink.open("plot.gp");
  out << "# line plots of the run outputs; load with gnuplot\n";
  out << "set datafile separator ','\n";
  out << "set key autotitle columnhead\n";
  out << "plot ";
  std::stringstream cols(ycols);
  std::string col;
  bool first = true;
  while (std::getline(cols, col, ',')) {
    if (!first) out << ", ";
    out << "'" << csv << "' using '" << xcol << "':'" << col << "' with lines";
    first = false;
  }
  out << "\n";
}

inline double require_exp(const RunConfig& cfg, const char* key) {
  auto it = cfg.experiment.find(key);
  if (it == cfg.experiment.end() || !it->second.is_number())
    throw ConfigError(std::string("experiment.") + key + ": required number missing");
  return it->second.number();
}

inline ClassifyOptions classify_options(const RunConfig& cfg, double rbar_value) {
  ClassifyOptions opt;
  opt.rbar = rbar_value;
  opt.T_max = exp_number(cfg, "T_max", cfg.T);
  opt.eps_v = exp_number(cfg, "eps_v", 1e-4);
  opt.margin = exp_number(cfg, "margin", 0.5);
  opt.outputs = static_cast<int>(exp_number(cfg, "outputs", 200));
  return opt;
}

inline double compute_rbar(const RunConfig& cfg, const MediumModel& model) {
  const double tol = exp_number(cfg, "rstar_tol", 1e-3);
  const int samples = static_cast<int>(exp_number(cfg, "rbar_samples", 8));
  return rbar(model, cfg.d, samples, tol);
}

inline void run_solve(const RunConfig& cfg, OutputSink& sink) {
  ProblemSpec spec = make_problem_spec(cfg);
  if (spec.mode != DomainMode::two_front && spec.mode != DomainMode::periodic_cell &&
      spec.numerics.bc_far == FarBoundary::clamp_to_steady) {
    auto cell = std::make_shared<PeriodicState>(
        periodic_state_cell(spec.model, spec.d, std::max(cfg.N / 4, 32), cfg.tol));
    const double wall = cfg.left_truncation;
    spec.numerics.far_clamp = [cell, wall](double t) { return cell->eval(t, wall); };
  }
  Trajectory traj = solve(spec, cfg.T, make_output_times(cfg), cfg.snapshots);
  write_trajectory_csv(sink.path("trajectory.csv"), traj);
  if (cfg.snapshots) {
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%04zu.csv", k);
      write_snapshot(sink.path(name), traj.snapshots[k]);
    }
  }
  auto out = sink.open("summary.csv");
  out << "H_emp_left,H_emp_right,clip_events,truncation_warning\n";
  out << fmt17(traj.H_emp_left) << ',' << fmt17(traj.H_emp_right) << ','
      << traj.clip_events << ',' << (traj.truncation_warning ? 1 : 0) << '\n';
  write_plot_script(sink, "trajectory.csv", "t", "g,h,umax");
}

inline void run_eigen(const RunConfig& cfg, OutputSink& sink) {
  const MediumModel model = make_medium(cfg);
  std::vector<double> ys = exp_array(cfg, "y_values");
  if (ys.empty()) ys.push_back(exp_number(cfg, "y", 0.0));
  std::vector<double> rs = exp_array(cfg, "R_values");
  if (rs.empty()) rs.push_back(require_exp(cfg, "R"));
  auto out = sink.open("eigen.csv");
  out << "y,R,lambda,rho,iters,residual\n";
  for (double y : ys)
    for (double R : rs) {
      EigenResult e = monodromy_eigen(model, cfg.d, y, R, cfg.eigen_grid, cfg.tol,
                                      cfg.eigen_substeps);
      out << fmt17(e.y) << ',' << fmt17(e.R) << ',' << fmt17(e.lambda) << ','
          << fmt17(e.rho) << ',' << e.iters << ',' << fmt17(e.residual) << '\n';
    }
}

inline void run_rstar(const RunConfig& cfg, OutputSink& sink) {
  const MediumModel model = make_medium(cfg);
  const double tol = exp_number(cfg, "rstar_tol", 1e-3);
  std::vector<double> ys = exp_array(cfg, "y_values");
  if (ys.empty()) {
    const int samples = static_cast<int>(exp_number(cfg, "samples", 1));
    for (int i = 0; i < samples; ++i) ys.push_back(model.L * i / samples);
  }
  auto out = sink.open("rstar.csv");
  out << "y,Rstar\n";
  for (double y : ys)
    out << fmt17(y) << ',' << fmt17(critical_radius(model, cfg.d, y, tol)) << '\n';
}

inline void run_lambda_inf(const RunConfig& cfg, OutputSink& sink) {
  const MediumModel model = make_medium(cfg);
  double R_used = 0.0;
  const double lam = lambda_infinity(model, cfg.d, cfg.tol, &R_used);
  auto out = sink.open("lambda_inf.csv");
  out << "lambda,R_used,tol\n";
  out << fmt17(lam) << ',' << fmt17(R_used) << ',' << fmt17(cfg.tol) << '\n';
}

inline void write_steady_outputs(const RunConfig& cfg, OutputSink& sink,
                                 const PeriodicState& st, const std::string& tag) {
  auto out = sink.open("steady_summary.csv");
  out << "tag,sup,inf_interior,residual,periods_used\n";
  out << tag << ',' << fmt17(st.sup()) << ',' << fmt17(st.inf_interior()) << ','
      << fmt17(st.residual) << ',' << st.periods_used << '\n';

  const int nsub = static_cast<int>(st.frames.size()) - 1;
  const int stride = std::max(nsub / static_cast<int>(exp_number(cfg, "frame_count", 8)), 1);
  for (int k = 0; k <= nsub; k += stride) {
    FrontState frame;
    frame.t = st.times[k];
    frame.g = st.x_lo;
    frame.h = st.x_hi;
    frame.w = st.frames[k];
    if (st.periodic_x) frame.w.push_back(st.frames[k][0]);
    char name[64];
    std::snprintf(name, sizeof name, "steady_frame_%04d.csv", k);
    write_snapshot(sink.path(name), frame);
  }
}

inline void run_steady(const RunConfig& cfg, OutputSink& sink) {
  const MediumModel model = make_medium(cfg);
  std::string domain = "cell";
  auto it = cfg.experiment.find("domain");
  if (it != cfg.experiment.end() && it->second.is_string()) domain = it->second.str();
  const int grid = static_cast<int>(exp_number(cfg, "grid", cfg.N));
  if (domain == "cell") {
    write_steady_outputs(cfg, sink, periodic_state_cell(model, cfg.d, grid, cfg.tol), "cell");
  } else if (domain == "dirichlet") {
    const double y = exp_number(cfg, "y", 0.0);
    const double R = require_exp(cfg, "R");
    write_steady_outputs(cfg, sink,
                         periodic_state_dirichlet(model, cfg.d, y, R, grid, cfg.tol),
                         "dirichlet");
  } else if (domain == "half_line") {
    const double X_L = exp_number(cfg, "X_L", -4.0 * model.L);
    write_steady_outputs(cfg, sink,
                         periodic_state_halfline(model, cfg.d, X_L, grid, cfg.tol),
                         "half_line");
  } else {
    throw ConfigError("experiment.domain: unknown steady domain '" + domain + "'");
  }
}

inline int run_classify(const RunConfig& cfg, OutputSink& sink) {
  ProblemSpec spec = make_problem_spec(cfg);
  const auto hyp = validate_hypotheses(spec.model, 32);
  if (!hyp.ok)
    throw ConfigError("medium: hypothesis violated: " +
                      std::string(hypothesis_name(hyp.violations[0].which)));
  const double rb = compute_rbar(cfg, spec.model);
  DichotomyVerdict v = classify(spec, classify_options(cfg, rb));
  auto out = sink.open("verdict.csv");
  out << "kind,trigger_time,front_length,umax\n";
  out << verdict_name(v.kind) << ','
      << (v.trigger_time ? fmt17(*v.trigger_time) : "") << ','
      << fmt17(v.front_length) << ',' << fmt17(v.umax_at_decision) << '\n';
  write_trajectory_csv(sink.path("evidence.csv"), v.evidence);
  write_plot_script(sink, "evidence.csv", "t", "g,h,umax");
  return v.kind == VerdictKind::Undecided ? 4 : 0;
}

inline int run_mu_star(const RunConfig& cfg, OutputSink& sink) {
  ProblemSpec spec = make_problem_spec(cfg);
  const double rb = compute_rbar(cfg, spec.model);
  const double lo = require_exp(cfg, "mu_lo");
  const double hi = require_exp(cfg, "mu_hi");
  const double tol = exp_number(cfg, "mu_tol", 0.02);
  MuStarResult res = mu_star(spec, lo, hi, tol, classify_options(cfg, rb));
  auto out = sink.open("mu_star.csv");
  out << "iter,mu_lo,mu_hi,verdict_mid\n";
  for (const auto& row : res.history)
    out << row.iter << ',' << fmt17(row.mu_lo) << ',' << fmt17(row.mu_hi) << ','
        << row.verdict_mid << '\n';
  auto summary = sink.open("mu_star_result.csv");
  summary << "mu_star,mu_lo,mu_hi\n";
  summary << fmt17(res.mu_star) << ',' << fmt17(res.mu_lo) << ',' << fmt17(res.mu_hi) << '\n';
  return 0;
}

inline void run_speed(const RunConfig& cfg, OutputSink& sink) {
  ProblemSpec spec = make_problem_spec(cfg);
  const double rb = compute_rbar(cfg, spec.model);
  const double wf = exp_number(cfg, "window_fraction", 0.5);
  const int outputs = static_cast<int>(exp_number(cfg, "outputs", 400));
  SpeedEstimate est = spreading_speed(spec, cfg.T, wf, rb, outputs);
  auto out = sink.open("speed.csv");
  out << "c_left,c_right,fit_residual\n";
  out << fmt17(est.c_left) << ',' << fmt17(est.c_right) << ','
      << fmt17(est.fit_residual) << '\n';
}

inline void run_semiwave(const RunConfig& cfg, OutputSink& sink) {
  const MediumModel model = make_medium(cfg);
  if (!model.is_homogeneous())
    throw ConfigError("medium: the semiwave oracle needs constant a and b");
  const double tol = exp_number(cfg, "c_tol", 1e-6);
  SemiwaveResult r = semiwave_speed(model.a.constant_term(), model.b.constant_term(),
                                    cfg.d, cfg.mu, tol);
  auto out = sink.open("semiwave.csv");
  out << "c,q_slope_origin\n";
  out << fmt17(r.c) << ',' << fmt17(r.q_slope_origin) << '\n';
}

struct ApproxLevelReport {
  int level = 0;  // 0 = raw
  double sup_diff_prev = 0.0;
  double H_emp_left = 0.0, H_emp_right = 0.0;
  long mono_violations = 0;
  long front_violations = 0;
};

/// Runs the approximating-sequence study: solves for u_{0n} at each level and
/// for the raw data, then checks pointwise ordering, nested fronts, and the
/// decay of successive sup-differences.
inline std::vector<ApproxLevelReport> approx_check(const RunConfig& cfg,
                                                   const std::vector<int>& levels) {
  if (levels.size() < 2) throw ConfigError("experiment.levels: need at least 2 entries");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1])
      throw ConfigError("experiment.levels: must be increasing");

  ProblemSpec base = make_problem_spec(cfg);
  if (base.mode != DomainMode::two_front)
    throw ConfigError("approx-check runs in two_front mode only");
  const auto times = make_output_times(cfg);

  struct LevelRun {
    int level;
    InitialData data;
    Trajectory traj;
  };
  std::vector<LevelRun> runs;
  for (int n : levels) {
    ProblemSpec spec = base;
    spec.init = build_approximants(base.init, n);
    runs.push_back({n, spec.init, solve(spec, cfg.T, times, true)});
  }
  runs.push_back({0, base.init, solve(base, cfg.T, times, true)});

  const double tol = 1e-10;
  std::vector<ApproxLevelReport> reports;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    ApproxLevelReport rep;
    rep.level = runs[i].level;
    rep.H_emp_left = runs[i].traj.H_emp_left;
    rep.H_emp_right = runs[i].traj.H_emp_right;
    if (i > 0) {
      const LevelRun& lo = runs[i - 1];
      const LevelRun& hi = runs[i];
      // initial samplers: exact pointwise ordering on a dense lattice
      for (int k = 0; k <= 1024; ++k) {
        const double x = lo.data.g0 + (lo.data.h0 - lo.data.g0) * k / 1024.0;
        if (lo.data.u0(x) > hi.data.u0(x) + tol) ++rep.mono_violations;
      }
      // solutions: ordering and sup-difference at the lower level's nodes
      double sup_diff = 0.0;
      for (std::size_t s = 0; s < lo.traj.snapshots.size(); ++s) {
        const FrontState& slo = lo.traj.snapshots[s];
        const FrontState& shi = hi.traj.snapshots[s];
        for (int j = 0; j <= slo.intervals(); ++j) {
          const double x = slo.x_of(j);
          const double vhi = shi.sample(x);
          if (vhi < slo.w[j] - tol) ++rep.mono_violations;
          sup_diff = std::max(sup_diff, std::fabs(vhi - slo.w[j]));
        }
        if (shi.h < slo.h - tol || shi.g > slo.g + tol) ++rep.front_violations;
      }
      rep.sup_diff_prev = sup_diff;
    }
    reports.push_back(rep);
  }
  return reports;
}

inline void run_approx_check(const RunConfig& cfg, OutputSink& sink) {
  std::vector<int> levels;
  for (double v : exp_array(cfg, "levels")) levels.push_back(static_cast<int>(v));
  if (levels.empty()) levels = {2, 4, 8};
  auto reports = approx_check(cfg, levels);
  auto out = sink.open("approx_report.csv");
  out << "level,sup_diff_prev,H_emp_left,H_emp_right,mono_violations,front_violations\n";
  for (const auto& r : reports)
    out << r.level << ',' << fmt17(r.sup_diff_prev) << ',' << fmt17(r.H_emp_left)
        << ',' << fmt17(r.H_emp_right) << ',' << r.mono_violations << ','
        << r.front_violations << '\n';
}

inline void run_sweep(const RunConfig& cfg, OutputSink& sink, int threads) {
  std::vector<double> mus = exp_array(cfg, "mu_values");
  if (mus.empty()) throw ConfigError("experiment.mu_values: required array missing");
  ProblemSpec base = make_problem_spec(cfg);
  const double rb = compute_rbar(cfg, base.model);
  const ClassifyOptions opt = classify_options(cfg, rb);

  std::vector<DichotomyVerdict> verdicts(mus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= mus.size()) return;
      ProblemSpec spec = base;
      spec.mu = mus[i];
      verdicts[i] = classify(spec, opt);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // assembled in parameter order regardless of completion order
  auto out = sink.open("verdicts.csv");
  out << "index,mu,kind,trigger_time,front_length,umax\n";
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const DichotomyVerdict& v = verdicts[i];
    char name[64];
    std::snprintf(name, sizeof name, "evidence_%03zu.csv", i);
    write_trajectory_csv(sink.path(name), v.evidence);
    out << i << ',' << fmt17(mus[i]) << ',' << verdict_name(v.kind) << ','
        << (v.trigger_time ? fmt17(*v.trigger_time) : "") << ','
        << fmt17(v.front_length) << ',' << fmt17(v.umax_at_decision) << '\n';
  }
  write_plot_script(sink, "verdicts.csv", "mu", "front_length,umax");
}

inline void write_manifest(const std::string& dir, const RunOptions& opt,
                           const RunRecord& rec) {
  std::ofstream out(dir + "/manifest.txt");
  out << "subcommand = " << opt.subcommand << '\n';
  out << "config = " << opt.config_path << '\n';
  out << "config_digest = " << rec.config_digest << '\n';
  out << "tool_version = " << FRONTLAB_VERSION << '\n';
  out << "threads = " << opt.threads << '\n';
  out << "seedless = " << (opt.seedless ? "true" : "false") << '\n';
  out << "status = " << rec.status << '\n';
  if (!rec.message.empty()) out << "error = " << rec.message << '\n';
  out << "wall_ms = " << rec.wall_ms << '\n';
  for (std::size_t i = 0; i < rec.files.size(); ++i)
    out << "outputs." << i << " = " << rec.files[i] << '\n';
}

}  // namespace detail

/// Executes one subcommand: parses and validates the config, dispatches to the
/// mapped operation, writes artifacts and a manifest into out_dir. Exit codes:
/// 0 success, 2 validation error, 3 numerical/convergence error, 4 undecided
/// or inconclusive outcome.
inline RunRecord run(const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  detail::OutputSink sink(opt.out_dir);
  try {
    const std::string text = detail::read_file(opt.config_path);
    rec.config_digest = config_digest(text);
    RunConfig cfg = parse_run_config(text);

    if (opt.subcommand == "solve") {
      detail::run_solve(cfg, sink);
    } else if (opt.subcommand == "eigen") {
      detail::run_eigen(cfg, sink);
    } else if (opt.subcommand == "rstar") {
      detail::run_rstar(cfg, sink);
    } else if (opt.subcommand == "lambda-inf") {
      detail::run_lambda_inf(cfg, sink);
    } else if (opt.subcommand == "steady") {
      detail::run_steady(cfg, sink);
    } else if (opt.subcommand == "classify") {
      rec.exit_code = detail::run_classify(cfg, sink);
      if (rec.exit_code == 4) rec.status = "undecided";
    } else if (opt.subcommand == "mu-star") {
      rec.exit_code = detail::run_mu_star(cfg, sink);
    } else if (opt.subcommand == "speed") {
      detail::run_speed(cfg, sink);
    } else if (opt.subcommand == "semiwave") {
      detail::run_semiwave(cfg, sink);
    } else if (opt.subcommand == "approx-check") {
      detail::run_approx_check(cfg, sink);
    } else if (opt.subcommand == "sweep") {
      detail::run_sweep(cfg, sink, opt.threads);
    } else {
      throw ConfigError("unknown subcommand '" + opt.subcommand + "'");
    }
  } catch (const InconclusiveError& e) {
    rec.exit_code = 4;
    rec.status = "inconclusive";
    rec.message = e.what();
  } catch (const ConfigError& e) {
    rec.exit_code = 2;
    rec.status = "validation_error";
    rec.message = e.what();
  } catch (const std::invalid_argument& e) {
    rec.exit_code = 2;
    rec.status = "validation_error";
    rec.message = e.what();
  } catch (const std::domain_error& e) {
    rec.exit_code = 2;
    rec.status = "validation_error";
    rec.message = e.what();
  } catch (const SolverError& e) {
    rec.exit_code = 3;
    rec.status = "numerical_error";
    rec.message = e.what();
  }
  rec.files = sink.files();
  rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  detail::write_manifest(opt.out_dir, opt, rec);
  return rec;
}

}  // namespace frontlab
