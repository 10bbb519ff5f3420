#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metamorph/config.hpp"
#include "metamorph/ensemble.hpp"

namespace metamorph {

struct RunOptions {
  std::string out_dir_override;  // empty: use config
  std::optional<std::uint64_t> seed_override;
  bool quiet = false;
  int thread_cap = 0;
};

struct RunManifest {
  std::string directory;
  std::vector<std::string> output_files;  // relative to directory
  std::uint64_t base_seed = 0;
  double wall_time_s = 0.0;
};

// Executes the scenario and writes all outputs plus manifest.json.
// Numeric outputs are deterministic functions of (config, seed); the
// manifest additionally records wall time.
RunManifest run_scenario(const ExperimentConfig& config, const RunOptions& options = {});

// Long-format trajectory CSV (t, entity, coordinate, value, realization);
// one row per (step, landmark, position coordinate).
void emit_plot_data(const Trajectory& trajectory, int n, int d,
                    const std::string& path, int realization = 0);

// One tidy file per statistic: <prefix>mean.csv, <prefix>variance.csv
// (t, coordinate, value) and <prefix>covariance.csv (row, col, value).
std::vector<std::string> emit_plot_data(const EnsembleStats& stats,
                                        const std::string& directory,
                                        const std::string& prefix);

}  // namespace metamorph
