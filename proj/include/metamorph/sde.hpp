#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metamorph/noise.hpp"

namespace metamorph {

// A system in the form  dx = f(x) dt + sum_c g_c(x) o dW^c  (Stratonovich).
// drift and diffusion are deterministic functions of the state; tangents
// have the state's shape.
class SdeSystem {
 public:
  virtual ~SdeSystem() = default;
  virtual int dim() const = 0;
  virtual int channels() const = 0;
  virtual void drift(std::span<const double> state, std::span<double> out) const = 0;
  virtual void diffusion(std::span<const double> state, int channel,
                         std::span<double> out) const = 0;
};

enum class Method { heun, euler_maruyama_ito };

Method method_from_string(const std::string& name);
std::string to_string(Method method);

struct Trajectory {
  std::vector<double> times;                // M+1, uniform grid
  std::vector<std::vector<double>> states;  // M+1 states
  std::uint64_t seed = 0;
  Method method = Method::heun;

  int steps() const { return static_cast<int>(times.size()) - 1; }
  const std::vector<double>& back() const { return states.back(); }
};

// Predictor-corrector (Euler-Heun) step for the Stratonovich convention;
// order-2 deterministic when the noise vanishes.
std::vector<double> euler_heun_step(const SdeSystem& system,
                                    std::span<const double> state, double dt,
                                    std::span<const double> dW);

// Ito Euler-Maruyama step; with use_ito_correction the Stratonovich drift
// correction is added so the step targets the same law as euler_heun_step.
std::vector<double> euler_maruyama_step(const SdeSystem& system,
                                        std::span<const double> state, double dt,
                                        std::span<const double> dW,
                                        bool use_ito_correction);

Trajectory integrate_path(const SdeSystem& system, std::span<const double> initial,
                          double T, int steps, const WienerPath& path, Method method);

struct ConvergenceLevel {
  double dt = 0.0;
  double mean_abs_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;
  double slope = 0.0;
  int excluded_paths = 0;
};

// Strong-error ladder against a refined-path reference at dt_ref = min(dt)/4;
// coarse increments are sums of the fine ones. Returns the least-squares
// slope of log E|X_T^dt - X_T^ref| against log dt.
ConvergenceReport strong_convergence_order(const SdeSystem& system,
                                           std::span<const double> initial, double T,
                                           std::span<const double> dt_ladder,
                                           int paths, std::uint64_t base_seed,
                                           Method method = Method::heun);

}  // namespace metamorph
