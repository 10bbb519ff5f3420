#include "metamorph/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "metamorph/rng.hpp"
#include "metamorph/sde.hpp"

namespace metamorph {

namespace {

void check_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument(what);
  }
}

}  // namespace

void DeformationNoiseField::validate() const {
  if (amplitude.empty()) {
    throw std::invalid_argument("noise field: amplitude must be non-empty");
  }
  if (!is_constant) {
    if (!(width > 0.0) || !std::isfinite(width)) {
      throw std::invalid_argument("noise field: width must be positive");
    }
    if (center.size() != amplitude.size()) {
      throw std::invalid_argument("noise field: center/amplitude dimension mismatch");
    }
  }
}

void DeformationNoiseField::value(std::span<const double> x,
                                  std::span<double> out) const {
  check_finite(x, "noise field: non-finite evaluation point");
  if (is_constant) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = amplitude[k];
    return;
  }
  double r2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dxk = x[k] - center[k];
    r2 += dxk * dxk;
  }
  const double bump = std::exp(-r2 / (2.0 * width * width));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = amplitude[k] * bump;
}

void DeformationNoiseField::jacobian(std::span<const double> x,
                                     std::span<double> out) const {
  check_finite(x, "noise field: non-finite evaluation point");
  const std::size_t d = amplitude.size();
  if (is_constant) {
    for (std::size_t k = 0; k < d * d; ++k) out[k] = 0.0;
    return;
  }
  double r2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double dxk = x[k] - center[k];
    r2 += dxk * dxk;
  }
  const double inv_w2 = 1.0 / (width * width);
  const double bump = std::exp(-0.5 * r2 * inv_w2);
  // D sigma = -a (x - c)^T / w^2 * bump
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out[i * d + j] = -amplitude[i] * (x[j] - center[j]) * inv_w2 * bump;
    }
  }
}

WienerPath sample_wiener_path(std::uint64_t seed, double dt, int steps,
                              int channels) {
  if (!(dt > 0.0)) throw std::invalid_argument("wiener path: dt must be positive");
  if (steps < 1) throw std::invalid_argument("wiener path: steps must be >= 1");
  if (channels < 0) throw std::invalid_argument("wiener path: channels must be >= 0");

  WienerPath path;
  path.seed = seed;
  path.dt = dt;
  path.steps = steps;
  path.channels = channels;
  path.increments.resize(static_cast<std::size_t>(steps) * channels);
  const double scale = std::sqrt(dt);
  for (int c = 0; c < channels; ++c) {
    const std::uint64_t stream = rng::derive_seed(seed, static_cast<std::uint64_t>(c), 1);
    for (int m = 0; m < steps; ++m) {
      path.increments[static_cast<std::size_t>(m) * channels + c] =
          scale * rng::standard_normal(stream, static_cast<std::uint64_t>(m));
    }
  }
  return path;
}

std::vector<double> ito_drift_correction(const SdeSystem& system,
                                         std::span<const double> state,
                                         double fd_step) {
  const int dim = system.dim();
  const int channels = system.channels();
  std::vector<double> correction(dim, 0.0);
  std::vector<double> g(dim), gp(dim), gm(dim);
  std::vector<double> xp(state.begin(), state.end());
  std::vector<double> xm(state.begin(), state.end());

  for (int c = 0; c < channels; ++c) {
    system.diffusion(state, c, g);
    for (int j = 0; j < dim; ++j) {
      const double xj = state[j];
      xp[j] = xj + fd_step;
      xm[j] = xj - fd_step;
      system.diffusion(xp, c, gp);
      system.diffusion(xm, c, gm);
      xp[j] = xj;
      xm[j] = xj;
      const double gj = g[j];
      if (gj == 0.0) continue;
      const double w = 0.5 * gj / (2.0 * fd_step);
      for (int i = 0; i < dim; ++i) {
        correction[i] += w * (gp[i] - gm[i]);
      }
    }
  }
  return correction;
}

}  // namespace metamorph
