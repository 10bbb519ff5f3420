#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace metamorph {

class SdeSystem;

// One deformation-noise channel sigma^u_l: either a Gaussian bump
// a * exp(-|x-c|^2 / (2 w^2)) or a spatially constant field a.
struct DeformationNoiseField {
  std::vector<double> center;     // c, size d (ignored when constant)
  double width = 1.0;             // w > 0 (ignored when constant)
  std::vector<double> amplitude;  // a, size d
  bool is_constant = false;

  int dim() const { return static_cast<int>(amplitude.size()); }
  void validate() const;

  // sigma(x); out has size d.
  void value(std::span<const double> x, std::span<double> out) const;
  // D sigma(x), row-major d x d; zero for constant fields.
  void jacobian(std::span<const double> x, std::span<double> out) const;
};

// Template-noise amplitudes. Landmark systems use one constant vector per
// landmark; the CH2 solver uses grid functions (one array per channel).
struct TemplateNoise {
  std::vector<std::vector<double>> per_landmark;   // n vectors of size d
  std::vector<std::vector<double>> grid_channels;  // K_nu arrays of size N

  bool empty() const { return per_landmark.empty() && grid_channels.empty(); }
};

// Seeded table of Brownian increments, increments(m, c) ~ N(0, dt).
// Bit-identical for identical (seed, dt, steps, channels).
struct WienerPath {
  std::uint64_t seed = 0;
  double dt = 0.0;
  int steps = 0;
  int channels = 0;
  std::vector<double> increments;  // steps x channels, row-major

  double operator()(int step, int channel) const {
    return increments[static_cast<std::size_t>(step) * channels + channel];
  }
  std::span<const double> row(int step) const {
    return {increments.data() + static_cast<std::size_t>(step) * channels,
            static_cast<std::size_t>(channels)};
  }
};

WienerPath sample_wiener_path(std::uint64_t seed, double dt, int steps, int channels);

// Stratonovich-to-Ito drift correction 1/2 sum_c (Dg_c) g_c, with Dg_c by
// central finite differences in state space.
std::vector<double> ito_drift_correction(const SdeSystem& system,
                                         std::span<const double> state,
                                         double fd_step = 1e-5);

}  // namespace metamorph
