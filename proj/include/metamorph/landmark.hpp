#pragma once

#include <span>
#include <vector>

#include "metamorph/kernel.hpp"
#include "metamorph/noise.hpp"
#include "metamorph/sde.hpp"

namespace metamorph {

// Phase-space point of n landmarks in d dimensions, row-major n x d.
struct LandmarkState {
  int n = 0;
  int d = 0;
  std::vector<double> q;
  std::vector<double> p;

  std::span<const double> q_at(int i) const { return {q.data() + i * d, static_cast<std::size_t>(d)}; }
  std::span<const double> p_at(int i) const { return {p.data() + i * d, static_cast<std::size_t>(d)}; }
  void validate() const;  // shapes agree, entries finite
};

struct LandmarkSystem {
  KernelSpec kernel;
  double lambda = 0.0;  // template-motion weight, >= 0
  std::vector<DeformationNoiseField> sigma_u;
  TemplateNoise sigma_nu;  // per-landmark vectors; one channel per landmark

  int u_channels() const { return static_cast<int>(sigma_u.size()); }
  bool has_template_noise() const { return !sigma_nu.per_landmark.empty(); }
  void validate(int n, int d) const;
};

struct PhaseTangent {
  std::vector<double> q;
  std::vector<double> p;
};

// h_K = 1/2 sum_ij p_i . p_j K(q_i - q_j)
double h_kernel(const LandmarkState& state, const KernelSpec& kernel);

// h = h_K + (lambda^2 / 2) sum_i |p_i|^2
double h_metamorphosis(const LandmarkState& state, const LandmarkSystem& system);

// Phi^u_l = sum_i p_i . sigma_l(q_i)
double stochastic_potential_u(const LandmarkState& state,
                              const DeformationNoiseField& field);

// dq_i = sum_j K(q_i - q_j) p_j + lambda^2 p_i ; dp_i = -sum_j (p_i.p_j) grad K(q_i - q_j)
PhaseTangent drift(const LandmarkState& state, const LandmarkSystem& system);

// Canonical tangent of Phi^u_l: dq_i = sigma_l(q_i), dp_i = -[D sigma_l(q_i)]^T p_i
PhaseTangent diffusion_u(const LandmarkState& state, const LandmarkSystem& system,
                         int channel);

// Canonical tangent of Phi^nu_i: dq_i = sigma_i^nu (additive), dp = 0.
PhaseTangent diffusion_nu(const LandmarkState& state, const LandmarkSystem& system,
                          int landmark);

std::vector<double> total_linear_momentum(const LandmarkState& state);

// Interpolating velocity field u(x) = sum_j K(x - q_j) p_j.
void landmark_velocity(const LandmarkState& state, const KernelSpec& kernel,
                       std::span<const double> x, std::span<double> out);

// Flat-state adapter: state = [q; p]. Channel layout is the K_u deformation
// channels followed by one template channel per landmark (when enabled).
class LandmarkSdeSystem : public SdeSystem {
 public:
  LandmarkSdeSystem(LandmarkSystem system, int n, int d, bool include_drift = true);

  int dim() const override { return 2 * n_ * d_; }
  int channels() const override;
  void drift(std::span<const double> state, std::span<double> out) const override;
  void diffusion(std::span<const double> state, int channel,
                 std::span<double> out) const override;

  std::vector<double> pack(const LandmarkState& state) const;
  LandmarkState unpack(std::span<const double> flat) const;
  int n() const { return n_; }
  int d() const { return d_; }
  const LandmarkSystem& system() const { return system_; }

 private:
  LandmarkSystem system_;
  int n_;
  int d_;
  bool include_drift_;
};

// Passive points advected by the deformation flow.
struct TracerCloud {
  int m = 0;
  int d = 0;
  std::vector<double> x;  // row-major m x d
};

// Advects tracers under dg = u(g) dt + sum_l sigma_l^u(g) o dW^l, reusing the
// integrator stages and increments of the landmark run. Template channels in
// `path` do not act on tracers.
std::vector<TracerCloud> flow_tracers(const TracerCloud& cloud,
                                      const LandmarkSystem& system,
                                      const Trajectory& landmarks, int n, int d,
                                      const WienerPath& path);

}  // namespace metamorph
