#include "metamorph/fda.hpp"

#include <cmath>
#include <stdexcept>

#include "metamorph/noise.hpp"
#include "metamorph/parallel.hpp"
#include "metamorph/rng.hpp"

namespace metamorph {

double GaussianBump1D::operator()(double s) const {
  const double z = (s - center) / width;
  return height * std::exp(-0.5 * z * z);
}

double FdaSpec::AmplitudeField::operator()(double s) const {
  return is_constant ? constant : bump(s);
}

double fda_template_eval(const FdaSpec& spec, double s) {
  double v = 0.0;
  for (const auto& b : spec.template_bumps) v += b(s);
  return v;
}

// Warp field with the boundary mask, vanishing at s = 0 and s = 1.
double fda_warp_field_eval(const GaussianBump1D& bump, double s) {
  return bump(s) * 4.0 * s * (1.0 - s);
}

void FdaSpec::validate() const {
  for (const auto& b : template_bumps) {
    if (!(b.width > 0.0)) throw std::invalid_argument("fda: template bump width must be positive");
  }
  for (const auto& b : warp_fields) {
    if (!(b.width > 0.0)) throw std::invalid_argument("fda: warp field width must be positive");
  }
  for (const auto& a : amplitude_fields) {
    if (!a.is_constant && !(a.bump.width > 0.0)) {
      throw std::invalid_argument("fda: amplitude field width must be positive");
    }
  }
  if (!(epsilon >= 0.0)) throw std::invalid_argument("fda: epsilon must be >= 0");
  if (samples_per_signal < 2) throw std::invalid_argument("fda: samples_per_signal must be >= 2");
  if (num_signals < 1) throw std::invalid_argument("fda: num_signals must be >= 1");
  if (!(T > 0.0) || steps < 1) throw std::invalid_argument("fda: bad horizon");
  if (u0 != 0.0 || nu0 != 0.0) {
    throw std::invalid_argument(
        "fda: non-zero initial momenta (u0, nu0) are not supported in this build");
  }
}

namespace {

// Heun step of the interval flow  ds = sum_l sigma_l(s) o dW^l  for a set of
// points; `sign` = -1 flows backward with negated increments.
void warp_flow_step(const FdaSpec& spec, std::vector<double>& pts,
                    std::span<const double> dW, double sign) {
  const int K = static_cast<int>(spec.warp_fields.size());
  for (double& s : pts) {
    double drift0 = 0.0;
    for (int l = 0; l < K; ++l) {
      drift0 += sign * dW[l] * fda_warp_field_eval(spec.warp_fields[l], s);
    }
    const double pred = s + drift0;
    double drift1 = 0.0;
    for (int l = 0; l < K; ++l) {
      drift1 += sign * dW[l] * fda_warp_field_eval(spec.warp_fields[l], pred);
    }
    s += 0.5 * (drift0 + drift1);
  }
}

}  // namespace

FdaTable generate_fda_signals(const FdaSpec& spec, std::uint64_t base_seed,
                              int thread_cap) {
  spec.validate();
  const int S = spec.samples_per_signal;
  const int R = spec.num_signals;
  const int Ku = static_cast<int>(spec.warp_fields.size());
  const int Knu = static_cast<int>(spec.amplitude_fields.size());
  const double dt = spec.T / spec.steps;

  FdaTable table;
  table.s.resize(S);
  for (int j = 0; j < S; ++j) table.s[j] = static_cast<double>(j) / (S - 1);
  table.f.assign(R, std::vector<double>(S, 0.0));
  table.warp.assign(R, std::vector<double>(S, 0.0));

  const int threads = resolve_thread_cap(thread_cap);
  parallel_for(R, threads, [&](int i) {
    const std::uint64_t seed = rng::derive_seed(base_seed, static_cast<std::uint64_t>(i));
    WienerPath path;
    if (Ku + Knu > 0) path = sample_wiener_path(seed, dt, spec.steps, Ku + Knu);

    // Forward flow: phi at the sample grid (diffeomorphism diagnostics).
    std::vector<double> fwd = table.s;
    if (Ku > 0) {
      for (int m = 0; m < spec.steps; ++m) {
        warp_flow_step(spec, fwd, path.row(m).subspan(0, Ku), 1.0);
      }
    }
    table.warp[i] = fwd;

    // Backward flow with negated increments: phi^{-1} at the sample grid.
    std::vector<double> bwd = table.s;
    if (Ku > 0) {
      for (int m = spec.steps - 1; m >= 0; --m) {
        warp_flow_step(spec, bwd, path.row(m).subspan(0, Ku), -1.0);
      }
      for (double s : bwd) {
        if (!(s >= -1e-9 && s <= 1.0 + 1e-9)) {
          throw std::logic_error("fda: warp left the interval");
        }
      }
      for (double s : fwd) {
        if (!(s >= -1e-9 && s <= 1.0 + 1e-9)) {
          throw std::logic_error("fda: warp left the interval");
        }
      }
    }

    // Amplitude path nu(s) = sum_k sigma_k(s) W_T^k.
    std::vector<double> w_T(Knu, 0.0);
    for (int k = 0; k < Knu; ++k) {
      for (int m = 0; m < spec.steps; ++m) w_T[k] += path(m, Ku + k);
    }

    const std::uint64_t eps_stream = rng::derive_seed(seed, 0, 2);
    for (int j = 0; j < S; ++j) {
      double f = fda_template_eval(spec, bwd[j]);
      for (int k = 0; k < Knu; ++k) f += spec.amplitude_fields[k](table.s[j]) * w_T[k];
      if (spec.epsilon > 0.0) {
        f += spec.epsilon * rng::standard_normal(eps_stream, static_cast<std::uint64_t>(j));
      }
      table.f[i][j] = f;
    }
  });

  return table;
}

}  // namespace metamorph
