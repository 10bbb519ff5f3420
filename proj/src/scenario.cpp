#include "metamorph/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "metamorph/errors.hpp"
#include "metamorph/fda.hpp"
#include "metamorph/io.hpp"
#include "metamorph/parallel.hpp"
#include "metamorph/rng.hpp"

namespace metamorph {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<int> output_step_indices(const OutputSpec& output, double T, int steps) {
  std::vector<int> indices;
  for (double t : output.times) {
    int idx = static_cast<int>(std::lround(t / T * steps));
    idx = std::clamp(idx, 0, steps);
    indices.push_back(idx);
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  if (indices.empty()) indices.push_back(steps);
  return indices;
}

std::string zero_pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

void write_landmark_trajectory_csv(const Trajectory& traj, int n, int d,
                                   const std::string& path) {
  CsvWriter csv(path);
  std::vector<std::string> header{"t", "i"};
  for (int k = 1; k <= d; ++k) header.push_back("q_" + std::to_string(k));
  for (int k = 1; k <= d; ++k) header.push_back("p_" + std::to_string(k));
  csv.header(header);
  const int nd = n * d;
  std::vector<double> row(2 + 2 * d);
  for (int m = 0; m < static_cast<int>(traj.times.size()); ++m) {
    const std::vector<double>& x = traj.states[m];
    for (int i = 0; i < n; ++i) {
      row[0] = traj.times[m];
      row[1] = i;
      for (int k = 0; k < d; ++k) row[2 + k] = x[i * d + k];
      for (int k = 0; k < d; ++k) row[2 + d + k] = x[nd + i * d + k];
      csv.row(row);
    }
  }
}

void write_tracer_csv(const std::vector<TracerCloud>& clouds,
                      const std::vector<double>& times, const std::string& path) {
  CsvWriter csv(path);
  const int d = clouds.empty() ? 0 : clouds.front().d;
  std::vector<std::string> header{"t", "i"};
  for (int k = 1; k <= d; ++k) header.push_back("x_" + std::to_string(k));
  csv.header(header);
  std::vector<double> row(2 + d);
  for (std::size_t m = 0; m < clouds.size(); ++m) {
    for (int i = 0; i < clouds[m].m; ++i) {
      row[0] = times[m];
      row[1] = i;
      for (int k = 0; k < d; ++k) row[2 + k] = clouds[m].x[i * d + k];
      csv.row(row);
    }
  }
}

json stats_to_json(const EnsembleStats& stats) {
  json j;
  j["times"] = stats.times;
  j["mean"] = stats.mean;
  j["variance"] = stats.variance;
  if (!stats.endpoint_covariance.empty()) {
    j["endpoint_covariance"] = stats.endpoint_covariance;
  }
  j["realization_count"] = stats.realization_count;
  j["failure_count"] = stats.failure_count;
  return j;
}

}  // namespace

void emit_plot_data(const Trajectory& trajectory, int n, int d,
                    const std::string& path, int realization) {
  CsvWriter csv(path);
  csv.header({"t", "entity", "coordinate", "value", "realization"});
  for (std::size_t m = 0; m < trajectory.times.size(); ++m) {
    const std::vector<double>& x = trajectory.states[m];
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) {
        csv.row({format_double(trajectory.times[m]), std::to_string(i),
                 "q_" + std::to_string(k + 1)},
                std::vector<double>{x[i * d + k], static_cast<double>(realization)});
      }
    }
  }
}

std::vector<std::string> emit_plot_data(const EnsembleStats& stats,
                                        const std::string& directory,
                                        const std::string& prefix) {
  std::vector<std::string> files;
  auto tidy = [&](const std::vector<std::vector<double>>& table, const std::string& name) {
    const std::string file = prefix + name + ".csv";
    CsvWriter csv(directory + "/" + file);
    csv.header({"t", "coordinate", "value"});
    for (std::size_t t = 0; t < table.size(); ++t) {
      for (std::size_t i = 0; i < table[t].size(); ++i) {
        csv.row(std::vector<double>{stats.times[t], static_cast<double>(i), table[t][i]});
      }
    }
    files.push_back(file);
  };
  tidy(stats.mean, "mean");
  tidy(stats.variance, "variance");
  if (!stats.endpoint_covariance.empty()) {
    const std::string file = prefix + "covariance.csv";
    CsvWriter csv(directory + "/" + file);
    csv.header({"row", "col", "value"});
    const int k = static_cast<int>(std::lround(std::sqrt(
        static_cast<double>(stats.endpoint_covariance.size()))));
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        csv.row(std::vector<double>{static_cast<double>(a), static_cast<double>(b),
                                    stats.endpoint_covariance[a * k + b]});
      }
    }
    files.push_back(file);
  }
  return files;
}

namespace {

struct ScenarioContext {
  const ExperimentConfig& config;
  std::string dir;
  std::uint64_t seed;
  int threads;
  std::vector<std::string> files;

  std::string file(const std::string& name) {
    files.push_back(name);
    return dir + "/" + name;
  }
};

void run_landmark_sde(ScenarioContext& ctx) {
  const LandmarkScenarioCfg& cfg = *ctx.config.landmark;
  const IntegratorSpec& integ = ctx.config.integrator;
  const int n = cfg.initial.n, d = cfg.initial.d;
  const int R = ctx.config.ensemble.realizations;
  const bool store = ctx.config.ensemble.store_trajectories || R == 1;

  LandmarkSdeSystem adapter(cfg.system, n, d);
  EnsembleSpec spec;
  spec.base_seed = ctx.seed;
  spec.realizations = R;
  spec.T = integ.T;
  spec.steps = integ.steps;
  spec.method = integ.method;
  spec.initial = adapter.pack(cfg.initial);
  spec.output_steps = output_step_indices(ctx.config.output, integ.T, integ.steps);
  spec.make_system = [&cfg, n, d]() {
    return std::make_unique<LandmarkSdeSystem>(cfg.system, n, d);
  };
  spec.covariance_indices.resize(n * d);
  for (int i = 0; i < n * d; ++i) spec.covariance_indices[i] = i;
  spec.failure_threshold = ctx.config.ensemble.failure_threshold;
  spec.store_trajectories = store;
  spec.thread_cap = ctx.threads;

  const EnsembleStats stats = run_ensemble(spec);

  if (ctx.config.output.json) {
    write_text_file(ctx.file("stats.json"), stats_to_json(stats).dump(2) + "\n");
  }
  if (ctx.config.output.csv) {
    for (const std::string& f : emit_plot_data(stats, ctx.dir, "stats_")) {
      ctx.files.push_back(f);
    }
  }
  if (store && ctx.config.output.csv) {
    for (std::size_t r = 0; r < stats.trajectories.size(); ++r) {
      write_landmark_trajectory_csv(
          stats.trajectories[r], n, d,
          ctx.file("trajectory_" + zero_pad(static_cast<int>(r), 6) + ".csv"));
    }
    if (!stats.trajectories.empty()) {
      emit_plot_data(stats.trajectories[0], n, d, ctx.file("plot_data.csv"), 0);
    }
    // Tracers ride each stored realization's increments.
    if (cfg.tracers.m > 0) {
      for (std::size_t r = 0; r < stats.trajectories.size(); ++r) {
        const Trajectory& traj = stats.trajectories[r];
        WienerPath path;
        if (adapter.channels() > 0) {
          path = sample_wiener_path(traj.seed, integ.T / integ.steps, integ.steps,
                                    adapter.channels());
        }
        const std::vector<TracerCloud> clouds =
            flow_tracers(cfg.tracers, cfg.system, traj, n, d, path);
        write_tracer_csv(clouds, traj.times,
                         ctx.file("tracers_" + zero_pad(static_cast<int>(r), 6) + ".csv"));
      }
    }
  }
}

void run_ch2_sde(ScenarioContext& ctx) {
  const Ch2ScenarioCfg& cfg = *ctx.config.ch2;
  const IntegratorSpec& integ = ctx.config.integrator;
  const int N = cfg.grid.N;
  const int R = ctx.config.ensemble.realizations;
  const bool store = ctx.config.ensemble.store_trajectories || R == 1;

  Ch2System reference_system(cfg.grid, cfg.initial.alpha, cfg.noise);
  EnsembleSpec spec;
  spec.base_seed = ctx.seed;
  spec.realizations = R;
  spec.T = integ.T;
  spec.steps = integ.steps;
  spec.method = integ.method;
  spec.initial = reference_system.pack(cfg.initial);
  spec.output_steps = output_step_indices(ctx.config.output, integ.T, integ.steps);
  spec.make_system = [&cfg]() {
    return std::make_unique<Ch2System>(cfg.grid, cfg.initial.alpha, cfg.noise);
  };
  spec.failure_threshold = ctx.config.ensemble.failure_threshold;
  spec.store_trajectories = store;
  spec.thread_cap = ctx.threads;

  const EnsembleStats stats = run_ensemble(spec);

  if (ctx.config.output.json) {
    write_text_file(ctx.file("stats.json"), stats_to_json(stats).dump(2) + "\n");
  }
  if (ctx.config.output.csv && store && !stats.trajectories.empty()) {
    const Trajectory& traj = stats.trajectories[0];
    const std::vector<double> x = cfg.grid.nodes();
    // Snapshots (x, m, rho, u) at the configured output times.
    for (std::size_t s = 0; s < spec.output_steps.size(); ++s) {
      const int step = spec.output_steps[s];
      const Ch2State state = reference_system.unpack(traj.states[step]);
      const std::vector<double> u = helmholtz_invert(state.m, state.alpha, cfg.grid);
      CsvWriter csv(ctx.file("ch2_snapshot_" + zero_pad(static_cast<int>(s), 3) + ".csv"));
      csv.header({"x", "m", "rho", "u"});
      for (int i = 0; i < N; ++i) {
        csv.row(std::vector<double>{x[i], state.m[i], state.rho[i], u[i]});
      }
    }
    // Invariant time series along the stored path.
    CsvWriter inv_csv(ctx.file("ch2_invariants.csv"));
    inv_csv.header({"t", "int_m", "int_rho", "h"});
    for (std::size_t m = 0; m < traj.times.size(); ++m) {
      const Ch2State state = reference_system.unpack(traj.states[m]);
      const Ch2Invariants inv = ch2_invariants(state, cfg.grid);
      inv_csv.row(std::vector<double>{traj.times[m], inv.int_m, inv.int_rho, inv.h});
    }
  }
  if (ctx.config.output.csv && R > 1) {
    for (const std::string& f : emit_plot_data(stats, ctx.dir, "stats_")) {
      ctx.files.push_back(f);
    }
  }
}

void run_landmark_match(ScenarioContext& ctx) {
  const MatchProblem& problem = ctx.config.match->problem;
  const MatchResult result = match_landmarks(problem);

  json j;
  json p0 = json::array();
  for (int i = 0; i < problem.n; ++i) {
    json row = json::array();
    for (int k = 0; k < problem.d; ++k) row.push_back(result.p0[i * problem.d + k]);
    p0.push_back(row);
  }
  j["p0"] = p0;
  j["residual"] = result.residual;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["energy"] = {{"total", result.energy_total},
                 {"deformation", result.energy_deformation},
                 {"template", result.energy_template}};
  write_text_file(ctx.file("match_result.json"), j.dump(2) + "\n");

  if (ctx.config.output.csv) {
    const ShootResult shot = shoot(problem.q0, result.p0, problem.n, problem.d,
                                   problem.system, problem.T, problem.steps);
    write_landmark_trajectory_csv(shot.trajectory, problem.n, problem.d,
                                  ctx.file("trajectory_match.csv"));
  }
}

void run_fda_generate(ScenarioContext& ctx) {
  const FdaSpec& spec = ctx.config.fda->spec;
  const FdaTable table = generate_fda_signals(spec, ctx.seed, ctx.threads);

  CsvWriter signals(ctx.file("fda_signals.csv"));
  signals.header({"signal", "s", "f"});
  for (std::size_t i = 0; i < table.f.size(); ++i) {
    for (std::size_t s = 0; s < table.s.size(); ++s) {
      signals.row(std::vector<double>{static_cast<double>(i), table.s[s], table.f[i][s]});
    }
  }
  CsvWriter warps(ctx.file("fda_warps.csv"));
  warps.header({"signal", "s", "phi"});
  for (std::size_t i = 0; i < table.warp.size(); ++i) {
    for (std::size_t s = 0; s < table.s.size(); ++s) {
      warps.row(std::vector<double>{static_cast<double>(i), table.s[s], table.warp[i][s]});
    }
  }
}

void run_convergence_study(ScenarioContext& ctx) {
  const ConvergenceScenarioCfg& cfg = *ctx.config.convergence;
  const IntegratorSpec& integ = ctx.config.integrator;
  LandmarkSdeSystem system(cfg.system, cfg.initial.n, cfg.initial.d);
  const std::vector<double> initial = system.pack(cfg.initial);

  std::vector<double> ladder;
  for (int steps : cfg.steps_ladder) ladder.push_back(integ.T / steps);
  const ConvergenceReport report = strong_convergence_order(
      system, initial, integ.T, ladder, cfg.paths, ctx.seed, integ.method);

  json j;
  j["slope"] = report.slope;
  j["excluded_paths"] = report.excluded_paths;
  json levels = json::array();
  for (const auto& level : report.levels) {
    levels.push_back({{"dt", level.dt}, {"mean_abs_error", level.mean_abs_error}});
  }
  j["levels"] = levels;
  write_text_file(ctx.file("convergence.json"), j.dump(2) + "\n");

  if (ctx.config.output.csv) {
    CsvWriter csv(ctx.file("convergence.csv"));
    csv.header({"dt", "mean_abs_error"});
    for (const auto& level : report.levels) {
      csv.row(std::vector<double>{level.dt, level.mean_abs_error});
    }
  }
}

}  // namespace

RunManifest run_scenario(const ExperimentConfig& config, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();

  ScenarioContext ctx{
      config,
      options.out_dir_override.empty() ? config.output.directory
                                       : options.out_dir_override,
      options.seed_override.value_or(config.ensemble.base_seed),
      resolve_thread_cap(options.thread_cap),
      {},
  };
  fs::create_directories(ctx.dir);

  switch (config.scenario) {
    case Scenario::landmark_sde: run_landmark_sde(ctx); break;
    case Scenario::ch2_sde: run_ch2_sde(ctx); break;
    case Scenario::landmark_match: run_landmark_match(ctx); break;
    case Scenario::fda_generate: run_fda_generate(ctx); break;
    case Scenario::convergence_study: run_convergence_study(ctx); break;
  }

  const auto t1 = std::chrono::steady_clock::now();

  RunManifest manifest;
  manifest.directory = ctx.dir;
  manifest.output_files = ctx.files;
  manifest.base_seed = ctx.seed;
  manifest.wall_time_s = std::chrono::duration<double>(t1 - t0).count();

  json echo = config.raw;
  if (!echo.contains("ensemble")) echo["ensemble"] = json::object();
  echo["ensemble"]["base_seed"] = ctx.seed;
  json m;
  m["config"] = echo;
  m["scenario"] = to_string(config.scenario);
  m["base_seed"] = ctx.seed;
  m["version"] = "0.1.0";
  m["warnings"] = config.warnings;
  m["outputs"] = ctx.files;
  m["wall_time_s"] = manifest.wall_time_s;
  write_text_file(ctx.dir + "/manifest.json", m.dump(2) + "\n");

  return manifest;
}

}  // namespace metamorph
