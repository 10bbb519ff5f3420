#include "metamorph/landmark.hpp"

#include <cmath>
#include <stdexcept>

namespace metamorph {

void LandmarkState::validate() const {
  if (n < 1 || d < 1) throw std::invalid_argument("landmark state: empty state");
  const std::size_t nd = static_cast<std::size_t>(n) * d;
  if (q.size() != nd || p.size() != nd) {
    throw std::invalid_argument("landmark state: q/p shape mismatch");
  }
  for (double v : q) {
    if (!std::isfinite(v)) throw std::invalid_argument("landmark state: non-finite q");
  }
  for (double v : p) {
    if (!std::isfinite(v)) throw std::invalid_argument("landmark state: non-finite p");
  }
}

void LandmarkSystem::validate(int n, int d) const {
  kernel.validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("landmark system: lambda must be >= 0");
  }
  for (const auto& field : sigma_u) {
    field.validate();
    if (field.dim() != d) {
      throw std::invalid_argument("landmark system: sigma_u dimension mismatch");
    }
  }
  if (has_template_noise()) {
    if (static_cast<int>(sigma_nu.per_landmark.size()) != n) {
      throw std::invalid_argument(
          "landmark system: sigma_nu must have one vector per landmark");
    }
    for (const auto& v : sigma_nu.per_landmark) {
      if (static_cast<int>(v.size()) != d) {
        throw std::invalid_argument("landmark system: sigma_nu dimension mismatch");
      }
    }
  }
}

namespace {

void check_shapes(const LandmarkState& state) {
  const std::size_t nd = static_cast<std::size_t>(state.n) * state.d;
  if (state.n < 1 || state.d < 1 || state.q.size() != nd || state.p.size() != nd) {
    throw std::invalid_argument("landmark state: q/p shape mismatch");
  }
}

}  // namespace

double h_kernel(const LandmarkState& state, const KernelSpec& kernel) {
  check_shapes(state);
  const int n = state.n, d = state.d;
  std::vector<double> diff(d);
  double h = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < d; ++k) diff[k] = state.q[i * d + k] - state.q[j * d + k];
      double pp = 0.0;
      for (int k = 0; k < d; ++k) pp += state.p[i * d + k] * state.p[j * d + k];
      h += pp * kernel_eval(kernel, diff);
    }
  }
  return 0.5 * h;
}

double h_metamorphosis(const LandmarkState& state, const LandmarkSystem& system) {
  double p2 = 0.0;
  for (double v : state.p) p2 += v * v;
  return h_kernel(state, system.kernel) + 0.5 * system.lambda * system.lambda * p2;
}

double stochastic_potential_u(const LandmarkState& state,
                              const DeformationNoiseField& field) {
  check_shapes(state);
  const int n = state.n, d = state.d;
  std::vector<double> sigma(d);
  double phi = 0.0;
  for (int i = 0; i < n; ++i) {
    field.value(state.q_at(i), sigma);
    for (int k = 0; k < d; ++k) phi += state.p[i * d + k] * sigma[k];
  }
  return phi;
}

PhaseTangent drift(const LandmarkState& state, const LandmarkSystem& system) {
  check_shapes(state);
  const int n = state.n, d = state.d;
  const double lam2 = system.lambda * system.lambda;
  PhaseTangent tangent;
  tangent.q.assign(static_cast<std::size_t>(n) * d, 0.0);
  tangent.p.assign(static_cast<std::size_t>(n) * d, 0.0);
  std::vector<double> diff(d), grad(d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < d; ++k) diff[k] = state.q[i * d + k] - state.q[j * d + k];
      const double kij = kernel_eval(system.kernel, diff);
      for (int k = 0; k < d; ++k) tangent.q[i * d + k] += kij * state.p[j * d + k];
      if (i != j) {
        kernel_grad(system.kernel, diff, grad);
        double pp = 0.0;
        for (int k = 0; k < d; ++k) pp += state.p[i * d + k] * state.p[j * d + k];
        for (int k = 0; k < d; ++k) tangent.p[i * d + k] -= pp * grad[k];
      }
    }
    for (int k = 0; k < d; ++k) tangent.q[i * d + k] += lam2 * state.p[i * d + k];
  }
  return tangent;
}

PhaseTangent diffusion_u(const LandmarkState& state, const LandmarkSystem& system,
                         int channel) {
  check_shapes(state);
  if (channel < 0 || channel >= system.u_channels()) {
    throw std::invalid_argument("diffusion_u: channel out of range");
  }
  const int n = state.n, d = state.d;
  const DeformationNoiseField& field = system.sigma_u[channel];
  PhaseTangent tangent;
  tangent.q.resize(static_cast<std::size_t>(n) * d);
  tangent.p.assign(static_cast<std::size_t>(n) * d, 0.0);
  std::vector<double> sigma(d), jac(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < n; ++i) {
    field.value(state.q_at(i), {tangent.q.data() + i * d, static_cast<std::size_t>(d)});
    if (!field.is_constant) {
      field.jacobian(state.q_at(i), jac);
      // p-tangent_i = -[D sigma(q_i)]^T p_i
      for (int k = 0; k < d; ++k) {
        double acc = 0.0;
        for (int r = 0; r < d; ++r) acc += jac[r * d + k] * state.p[i * d + r];
        tangent.p[i * d + k] = -acc;
      }
    }
  }
  return tangent;
}

PhaseTangent diffusion_nu(const LandmarkState& state, const LandmarkSystem& system,
                          int landmark) {
  check_shapes(state);
  if (!system.has_template_noise() || landmark < 0 || landmark >= state.n) {
    throw std::invalid_argument("diffusion_nu: landmark index out of range");
  }
  const int n = state.n, d = state.d;
  PhaseTangent tangent;
  tangent.q.assign(static_cast<std::size_t>(n) * d, 0.0);
  tangent.p.assign(static_cast<std::size_t>(n) * d, 0.0);
  const std::vector<double>& sigma = system.sigma_nu.per_landmark[landmark];
  for (int k = 0; k < d; ++k) tangent.q[landmark * d + k] = sigma[k];
  return tangent;
}

std::vector<double> total_linear_momentum(const LandmarkState& state) {
  check_shapes(state);
  std::vector<double> total(state.d, 0.0);
  for (int i = 0; i < state.n; ++i) {
    for (int k = 0; k < state.d; ++k) total[k] += state.p[i * state.d + k];
  }
  return total;
}

void landmark_velocity(const LandmarkState& state, const KernelSpec& kernel,
                       std::span<const double> x, std::span<double> out) {
  const int n = state.n, d = state.d;
  std::vector<double> diff(d);
  for (int k = 0; k < d; ++k) out[k] = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < d; ++k) diff[k] = x[k] - state.q[j * d + k];
    const double kj = kernel_eval(kernel, diff);
    for (int k = 0; k < d; ++k) out[k] += kj * state.p[j * d + k];
  }
}

LandmarkSdeSystem::LandmarkSdeSystem(LandmarkSystem system, int n, int d,
                                     bool include_drift)
    : system_(std::move(system)), n_(n), d_(d), include_drift_(include_drift) {
  system_.validate(n, d);
}

int LandmarkSdeSystem::channels() const {
  return system_.u_channels() + (system_.has_template_noise() ? n_ : 0);
}

std::vector<double> LandmarkSdeSystem::pack(const LandmarkState& state) const {
  std::vector<double> flat(state.q);
  flat.insert(flat.end(), state.p.begin(), state.p.end());
  return flat;
}

LandmarkState LandmarkSdeSystem::unpack(std::span<const double> flat) const {
  LandmarkState state;
  state.n = n_;
  state.d = d_;
  const std::size_t nd = static_cast<std::size_t>(n_) * d_;
  state.q.assign(flat.begin(), flat.begin() + nd);
  state.p.assign(flat.begin() + nd, flat.end());
  return state;
}

void LandmarkSdeSystem::drift(std::span<const double> state,
                              std::span<double> out) const {
  if (!include_drift_) {
    for (auto& v : out) v = 0.0;
    return;
  }
  const LandmarkState s = unpack(state);
  const PhaseTangent t = metamorph::drift(s, system_);
  const std::size_t nd = t.q.size();
  for (std::size_t i = 0; i < nd; ++i) out[i] = t.q[i];
  for (std::size_t i = 0; i < nd; ++i) out[nd + i] = t.p[i];
}

void LandmarkSdeSystem::diffusion(std::span<const double> state, int channel,
                                  std::span<double> out) const {
  const LandmarkState s = unpack(state);
  const int ku = system_.u_channels();
  PhaseTangent t;
  if (channel < ku) {
    t = metamorph::diffusion_u(s, system_, channel);
  } else {
    t = metamorph::diffusion_nu(s, system_, channel - ku);
  }
  const std::size_t nd = t.q.size();
  for (std::size_t i = 0; i < nd; ++i) out[i] = t.q[i];
  for (std::size_t i = 0; i < nd; ++i) out[nd + i] = t.p[i];
}

std::vector<TracerCloud> flow_tracers(const TracerCloud& cloud,
                                      const LandmarkSystem& system,
                                      const Trajectory& landmarks, int n, int d,
                                      const WienerPath& path) {
  const int steps = landmarks.steps();
  const int ku = system.u_channels();
  if (ku > 0 && (path.steps < steps || path.channels < ku)) {
    throw std::invalid_argument("flow_tracers: time grid mismatch with wiener path");
  }
  if (cloud.d != d) throw std::invalid_argument("flow_tracers: dimension mismatch");

  const LandmarkSdeSystem adapter(system, n, d);
  std::vector<TracerCloud> out;
  out.reserve(steps + 1);
  out.push_back(cloud);

  std::vector<double> pred_state(adapter.dim()), f0(adapter.dim()), g0(adapter.dim());
  std::vector<double> u0(d), u1(d), s0(d), s1(d), xpred(d);

  for (int m = 0; m < steps; ++m) {
    const double dt = landmarks.times[m + 1] - landmarks.times[m];
    const std::vector<double>& x_m = landmarks.states[m];
    const LandmarkState lm = adapter.unpack(x_m);

    // Replicate the predictor stage of the landmark step so tracer and
    // landmark corrector velocities agree.
    adapter.drift(x_m, f0);
    for (int i = 0; i < adapter.dim(); ++i) pred_state[i] = x_m[i] + dt * f0[i];
    if (landmarks.method == Method::heun) {
      for (int c = 0; c < path.channels; ++c) {
        const double dw = path(m, c);
        if (dw == 0.0) continue;
        adapter.diffusion(x_m, c, g0);
        for (int i = 0; i < adapter.dim(); ++i) pred_state[i] += dw * g0[i];
      }
    }
    const LandmarkState lm_pred = adapter.unpack(pred_state);

    const TracerCloud& cur = out.back();
    TracerCloud next = cur;
    std::vector<double> jac(static_cast<std::size_t>(d) * d);
    for (int t = 0; t < cloud.m; ++t) {
      std::span<const double> x0{cur.x.data() + t * d, static_cast<std::size_t>(d)};
      std::span<double> xn{next.x.data() + t * d, static_cast<std::size_t>(d)};
      landmark_velocity(lm, system.kernel, x0, u0);
      if (landmarks.method == Method::heun) {
        for (int k = 0; k < d; ++k) xpred[k] = x0[k] + dt * u0[k];
        for (int l = 0; l < ku; ++l) {
          const double dw = path(m, l);
          if (dw == 0.0) continue;
          system.sigma_u[l].value(x0, s0);
          for (int k = 0; k < d; ++k) xpred[k] += dw * s0[k];
        }
        landmark_velocity(lm_pred, system.kernel, xpred, u1);
        for (int k = 0; k < d; ++k) xn[k] = x0[k] + 0.5 * dt * (u0[k] + u1[k]);
        for (int l = 0; l < ku; ++l) {
          const double dw = path(m, l);
          if (dw == 0.0) continue;
          system.sigma_u[l].value(x0, s0);
          system.sigma_u[l].value(xpred, s1);
          for (int k = 0; k < d; ++k) xn[k] += 0.5 * dw * (s0[k] + s1[k]);
        }
      } else {
        // Ito step with the tracer flow's own Stratonovich correction
        // 1/2 sum_l D sigma_l sigma_l, analytic for bump fields.
        for (int k = 0; k < d; ++k) xn[k] = x0[k] + dt * u0[k];
        for (int l = 0; l < ku; ++l) {
          const DeformationNoiseField& field = system.sigma_u[l];
          field.value(x0, s0);
          field.jacobian(x0, jac);
          const double dw = path(m, l);
          for (int k = 0; k < d; ++k) {
            double corr = 0.0;
            for (int r = 0; r < d; ++r) corr += jac[k * d + r] * s0[r];
            xn[k] += 0.5 * dt * corr + dw * s0[k];
          }
        }
      }
    }
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace metamorph
