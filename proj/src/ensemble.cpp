#include "metamorph/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "metamorph/errors.hpp"
#include "metamorph/parallel.hpp"
#include "metamorph/rng.hpp"

namespace metamorph {

namespace {

struct RealizationResult {
  bool failed = false;
  std::vector<std::vector<double>> outputs;  // [output step][dim]
  Trajectory trajectory;                     // only when stored
};

}  // namespace

EnsembleStats run_ensemble(const EnsembleSpec& spec) {
  if (spec.realizations < 1) {
    throw std::invalid_argument("ensemble: realizations must be >= 1");
  }
  if (!spec.make_system) throw std::invalid_argument("ensemble: missing system factory");
  if (!(spec.T > 0.0) || spec.steps < 1) {
    throw std::invalid_argument("ensemble: bad horizon");
  }
  std::vector<int> out_steps = spec.output_steps;
  if (out_steps.empty()) out_steps.push_back(spec.steps);
  for (int s : out_steps) {
    if (s < 0 || s > spec.steps) {
      throw std::invalid_argument("ensemble: output step out of range");
    }
  }

  const int R = spec.realizations;
  const double dt = spec.T / spec.steps;
  std::vector<RealizationResult> results(R);

  const int threads = resolve_thread_cap(spec.thread_cap);
  parallel_for(R, threads, [&](int r) {
    const std::unique_ptr<SdeSystem> system = spec.make_system();
    if (static_cast<int>(spec.initial.size()) != system->dim()) {
      throw std::invalid_argument("ensemble: initial state dimension mismatch");
    }
    const std::uint64_t seed = rng::derive_seed(spec.base_seed, static_cast<std::uint64_t>(r));
    WienerPath path;
    if (system->channels() > 0) {
      path = sample_wiener_path(seed, dt, spec.steps, system->channels());
    } else {
      path.seed = seed;
      path.dt = dt;
      path.steps = spec.steps;
    }
    try {
      Trajectory traj =
          integrate_path(*system, spec.initial, spec.T, spec.steps, path, spec.method);
      RealizationResult& res = results[r];
      res.outputs.reserve(out_steps.size());
      for (int s : out_steps) res.outputs.push_back(traj.states[s]);
      if (spec.store_trajectories) res.trajectory = std::move(traj);
    } catch (const BlowupError&) {
      results[r].failed = true;
    }
  });

  EnsembleStats stats;
  for (const auto& res : results) {
    if (res.failed) ++stats.failure_count;
  }
  const int used = R - stats.failure_count;
  if (used == 0 || static_cast<double>(stats.failure_count) > spec.failure_threshold * R) {
    throw std::runtime_error("ensemble: failure fraction exceeds threshold (" +
                             std::to_string(stats.failure_count) + " of " +
                             std::to_string(R) + ")");
  }
  stats.realization_count = used;

  const int dim = static_cast<int>(spec.initial.size());
  const int n_out = static_cast<int>(out_steps.size());
  stats.times.resize(n_out);
  stats.mean.assign(n_out, std::vector<double>(dim, 0.0));
  stats.variance.assign(n_out, std::vector<double>(dim, 0.0));
  for (int t = 0; t < n_out; ++t) stats.times[t] = out_steps[t] * dt;

  // Two-pass moments in realization order: schedule-independent.
  for (int t = 0; t < n_out; ++t) {
    for (int r = 0; r < R; ++r) {
      if (results[r].failed) continue;
      const std::vector<double>& x = results[r].outputs[t];
      for (int i = 0; i < dim; ++i) stats.mean[t][i] += x[i];
    }
    for (int i = 0; i < dim; ++i) stats.mean[t][i] /= used;
    if (used > 1) {
      for (int r = 0; r < R; ++r) {
        if (results[r].failed) continue;
        const std::vector<double>& x = results[r].outputs[t];
        for (int i = 0; i < dim; ++i) {
          const double dev = x[i] - stats.mean[t][i];
          stats.variance[t][i] += dev * dev;
        }
      }
      for (int i = 0; i < dim; ++i) stats.variance[t][i] /= (used - 1);
    }
  }

  // Endpoint covariance over the requested coordinate subset.
  if (!spec.covariance_indices.empty() && used > 1) {
    const int k = static_cast<int>(spec.covariance_indices.size());
    const int last = n_out - 1;
    stats.endpoint_covariance.assign(static_cast<std::size_t>(k) * k, 0.0);
    for (int r = 0; r < R; ++r) {
      if (results[r].failed) continue;
      const std::vector<double>& x = results[r].outputs[last];
      for (int a = 0; a < k; ++a) {
        const double da = x[spec.covariance_indices[a]] -
                          stats.mean[last][spec.covariance_indices[a]];
        for (int b = 0; b < k; ++b) {
          const double db = x[spec.covariance_indices[b]] -
                            stats.mean[last][spec.covariance_indices[b]];
          stats.endpoint_covariance[static_cast<std::size_t>(a) * k + b] += da * db;
        }
      }
    }
    for (auto& v : stats.endpoint_covariance) v /= (used - 1);
  }

  if (spec.store_trajectories) {
    stats.trajectories.reserve(used);
    for (auto& res : results) {
      if (!res.failed) stats.trajectories.push_back(std::move(res.trajectory));
    }
  }
  return stats;
}

Moments endpoint_moments(const std::vector<Trajectory>& set, int time_index) {
  if (set.size() < 2) {
    throw std::invalid_argument("moments: need at least two trajectories");
  }
  const int R = static_cast<int>(set.size());
  const int dim = static_cast<int>(set[0].states[0].size());
  for (const auto& traj : set) {
    if (time_index < 0 || time_index >= static_cast<int>(traj.states.size())) {
      throw std::invalid_argument("moments: time index out of range");
    }
  }
  Moments m;
  m.dim = dim;
  m.mean.assign(dim, 0.0);
  m.covariance.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (const auto& traj : set) {
    const std::vector<double>& x = traj.states[time_index];
    for (int i = 0; i < dim; ++i) m.mean[i] += x[i];
  }
  for (int i = 0; i < dim; ++i) m.mean[i] /= R;
  for (const auto& traj : set) {
    const std::vector<double>& x = traj.states[time_index];
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        m.covariance[static_cast<std::size_t>(i) * dim + j] +=
            (x[i] - m.mean[i]) * (x[j] - m.mean[j]);
      }
    }
  }
  for (auto& v : m.covariance) v /= (R - 1);
  return m;
}

}  // namespace metamorph
