#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "metamorph/sde.hpp"

namespace metamorph {

// Builds a fresh system instance per worker, so systems with internal
// workspaces can run concurrently.
using SystemFactory = std::function<std::unique_ptr<SdeSystem>()>;

struct EnsembleSpec {
  std::uint64_t base_seed = 0;
  int realizations = 1;  // R >= 1; realization r uses seed derive(base_seed, r)
  double T = 1.0;
  int steps = 1;
  Method method = Method::heun;
  std::vector<double> initial;
  std::vector<int> output_steps;  // ascending indices in [0, steps]
  SystemFactory make_system;
  std::vector<int> covariance_indices;  // endpoint covariance subset
  double failure_threshold = 0.01;      // error when failures exceed this fraction
  bool store_trajectories = false;
  int thread_cap = 0;  // 0: METAMORPH_THREADS / hardware
};

struct EnsembleStats {
  std::vector<double> times;
  std::vector<std::vector<double>> mean;      // [output time][coordinate]
  std::vector<std::vector<double>> variance;  // [output time][coordinate], 1/(R-1)
  std::vector<double> endpoint_covariance;    // k x k row-major over covariance_indices
  int realization_count = 0;
  int failure_count = 0;
  std::vector<Trajectory> trajectories;  // populated when store_trajectories
};

// R independent realizations with derived seeds; statistics aggregated in
// realization order (two-pass), so results do not depend on the schedule.
EnsembleStats run_ensemble(const EnsembleSpec& spec);

struct Moments {
  int dim = 0;
  std::vector<double> mean;
  std::vector<double> covariance;  // dim x dim row-major
};

// Sample mean and covariance (1/(R-1)) of states[time_index] over the set.
// Throws for fewer than two trajectories.
Moments endpoint_moments(const std::vector<Trajectory>& set, int time_index);

}  // namespace metamorph
