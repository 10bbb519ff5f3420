#include "metamorph/sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "metamorph/errors.hpp"
#include "metamorph/rng.hpp"

namespace metamorph {

Method method_from_string(const std::string& name) {
  if (name == "heun") return Method::heun;
  if (name == "euler_maruyama_ito") return Method::euler_maruyama_ito;
  throw std::invalid_argument("unknown integrator method: " + name);
}

std::string to_string(Method method) {
  switch (method) {
    case Method::heun: return "heun";
    case Method::euler_maruyama_ito: return "euler_maruyama_ito";
  }
  return "?";
}

namespace {

bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Reusable buffers for one integration, avoids per-step allocation.
struct Stepper {
  const SdeSystem& system;
  int dim;
  std::vector<double> f0, f1, g0, g1, pred, next;

  explicit Stepper(const SdeSystem& sys)
      : system(sys),
        dim(sys.dim()),
        f0(dim), f1(dim), g0(dim), g1(dim), pred(dim), next(dim) {}

  void heun(std::span<const double> x, double dt, std::span<const double> dW) {
    const int C = static_cast<int>(dW.size());
    system.drift(x, f0);
    for (int i = 0; i < dim; ++i) pred[i] = x[i] + dt * f0[i];
    for (int c = 0; c < C; ++c) {
      if (dW[c] == 0.0) continue;
      system.diffusion(x, c, g0);
      for (int i = 0; i < dim; ++i) pred[i] += dW[c] * g0[i];
    }
    system.drift(pred, f1);
    for (int i = 0; i < dim; ++i) next[i] = x[i] + 0.5 * dt * (f0[i] + f1[i]);
    for (int c = 0; c < C; ++c) {
      if (dW[c] == 0.0) continue;
      system.diffusion(x, c, g0);
      system.diffusion(pred, c, g1);
      for (int i = 0; i < dim; ++i) next[i] += 0.5 * dW[c] * (g0[i] + g1[i]);
    }
  }

  void euler_maruyama(std::span<const double> x, double dt,
                      std::span<const double> dW, bool ito_correction) {
    const int C = static_cast<int>(dW.size());
    system.drift(x, f0);
    if (ito_correction && system.channels() > 0) {
      const std::vector<double> corr = ito_drift_correction(system, x);
      for (int i = 0; i < dim; ++i) f0[i] += corr[i];
    }
    for (int i = 0; i < dim; ++i) next[i] = x[i] + dt * f0[i];
    for (int c = 0; c < C; ++c) {
      if (dW[c] == 0.0) continue;
      system.diffusion(x, c, g0);
      for (int i = 0; i < dim; ++i) next[i] += dW[c] * g0[i];
    }
  }
};

}  // namespace

std::vector<double> euler_heun_step(const SdeSystem& system,
                                    std::span<const double> state, double dt,
                                    std::span<const double> dW) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  Stepper s(system);
  s.heun(state, dt, dW);
  if (!all_finite(s.next)) throw BlowupError(0, "non-finite state after Heun step");
  return s.next;
}

std::vector<double> euler_maruyama_step(const SdeSystem& system,
                                        std::span<const double> state, double dt,
                                        std::span<const double> dW,
                                        bool use_ito_correction) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  Stepper s(system);
  s.euler_maruyama(state, dt, dW, use_ito_correction);
  if (!all_finite(s.next)) {
    throw BlowupError(0, "non-finite state after Euler-Maruyama step");
  }
  return s.next;
}

Trajectory integrate_path(const SdeSystem& system, std::span<const double> initial,
                          double T, int steps, const WienerPath& path,
                          Method method) {
  if (!(T > 0.0)) throw std::invalid_argument("integrate_path: T must be positive");
  if (steps < 1) throw std::invalid_argument("integrate_path: steps must be >= 1");
  if (static_cast<int>(initial.size()) != system.dim()) {
    throw std::invalid_argument("integrate_path: initial state dimension mismatch");
  }
  if (system.channels() > 0 &&
      (path.steps < steps || path.channels != system.channels())) {
    throw std::invalid_argument("integrate_path: wiener path shape mismatch");
  }

  const double dt = T / steps;
  Trajectory traj;
  traj.seed = path.seed;
  traj.method = method;
  traj.times.resize(steps + 1);
  traj.states.reserve(steps + 1);
  traj.states.emplace_back(initial.begin(), initial.end());

  Stepper s(system);
  const std::vector<double> no_noise;
  for (int m = 0; m < steps; ++m) {
    traj.times[m] = m * dt;
    std::span<const double> dW =
        system.channels() > 0 ? path.row(m) : std::span<const double>(no_noise);
    const std::vector<double>& x = traj.states.back();
    if (method == Method::heun) {
      s.heun(x, dt, dW);
    } else {
      s.euler_maruyama(x, dt, dW, true);
    }
    if (!all_finite(s.next)) {
      throw BlowupError(static_cast<std::size_t>(m),
                        "non-finite state at step " + std::to_string(m));
    }
    traj.states.emplace_back(s.next);
  }
  traj.times[steps] = T;
  return traj;
}

namespace {

// Sum groups of `factor` fine rows into one coarse row per step.
WienerPath coarsen(const WienerPath& fine, int factor) {
  WienerPath coarse;
  coarse.seed = fine.seed;
  coarse.dt = fine.dt * factor;
  coarse.steps = fine.steps / factor;
  coarse.channels = fine.channels;
  coarse.increments.assign(
      static_cast<std::size_t>(coarse.steps) * coarse.channels, 0.0);
  for (int m = 0; m < coarse.steps; ++m) {
    for (int j = 0; j < factor; ++j) {
      const int fm = m * factor + j;
      for (int c = 0; c < fine.channels; ++c) {
        coarse.increments[static_cast<std::size_t>(m) * coarse.channels + c] +=
            fine(fm, c);
      }
    }
  }
  return coarse;
}

}  // namespace

ConvergenceReport strong_convergence_order(const SdeSystem& system,
                                           std::span<const double> initial, double T,
                                           std::span<const double> dt_ladder,
                                           int paths, std::uint64_t base_seed,
                                           Method method) {
  if (dt_ladder.size() < 4) {
    throw std::invalid_argument("convergence: ladder needs >= 4 levels");
  }
  std::vector<double> ladder(dt_ladder.begin(), dt_ladder.end());
  std::sort(ladder.begin(), ladder.end());
  const double dt_min = ladder.front();
  for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
    const double ratio = ladder[i + 1] / ladder[i];
    const double k = std::round(std::log2(ratio));
    if (k < 1.0 || std::abs(ratio - std::ldexp(1.0, static_cast<int>(k))) > 1e-9 * ratio) {
      throw std::invalid_argument("convergence: ladder must be dyadic");
    }
  }
  const double dt_ref = dt_min / 4.0;
  const int ref_steps = static_cast<int>(std::round(T / dt_ref));
  if (std::abs(ref_steps * dt_ref - T) > 1e-9 * T) {
    throw std::invalid_argument("convergence: ladder steps must divide T");
  }

  const int L = static_cast<int>(ladder.size());
  std::vector<double> err_sum(L, 0.0);
  int excluded = 0;
  const bool deterministic = system.channels() == 0;
  const int R = deterministic ? 1 : paths;

  for (int r = 0; r < R; ++r) {
    const std::uint64_t seed = rng::derive_seed(base_seed, static_cast<std::uint64_t>(r));
    WienerPath fine;
    if (!deterministic) {
      fine = sample_wiener_path(seed, dt_ref, ref_steps, system.channels());
    } else {
      fine.seed = seed;
      fine.dt = dt_ref;
      fine.steps = ref_steps;
      fine.channels = 0;
    }
    try {
      const Trajectory ref = integrate_path(system, initial, T, ref_steps, fine, method);
      const std::vector<double>& x_ref = ref.back();
      for (int l = 0; l < L; ++l) {
        const int factor = static_cast<int>(std::round(ladder[l] / dt_ref));
        const WienerPath coarse = deterministic ? fine : coarsen(fine, factor);
        const int steps_l = ref_steps / factor;
        const Trajectory sol = integrate_path(system, initial, T, steps_l, coarse, method);
        double e2 = 0.0;
        for (int i = 0; i < system.dim(); ++i) {
          const double diff = sol.back()[i] - x_ref[i];
          e2 += diff * diff;
        }
        err_sum[l] += std::sqrt(e2);
      }
    } catch (const BlowupError&) {
      ++excluded;
      if (excluded * 100 > R) {
        throw std::runtime_error("convergence: more than 1% of paths blew up");
      }
      continue;
    }
  }

  const int used = R - excluded;
  if (used < 1) throw std::runtime_error("convergence: no usable paths");

  ConvergenceReport report;
  report.excluded_paths = excluded;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int l = 0; l < L; ++l) {
    const double mean_err = err_sum[l] / used;
    report.levels.push_back({ladder[l], mean_err});
    const double lx = std::log(ladder[l]);
    const double ly = std::log(mean_err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  report.slope = (L * sxy - sx * sy) / (L * sxx - sx * sx);
  return report;
}

}  // namespace metamorph
