#pragma once

#include <cstdint>
#include <vector>

namespace metamorph {

struct GaussianBump1D {
  double center = 0.5;
  double width = 0.1;
  double height = 1.0;

  double operator()(double s) const;
};

// Generative model for functional data on I = [0,1]:
//   f_i(s) = eta(phi_i^{-1}(s)) + nu_i(s) + eps_ij
// where phi_i is the flow of the warp-noise fields (phase variation) and
// nu_i(s) = sum_k sigma_k(s) W_T^k (amplitude variation).
struct FdaSpec {
  std::vector<GaussianBump1D> template_bumps;  // eta

  // Warp channels: bumps multiplied by the boundary mask 4 s (1-s), so the
  // flow fixes the endpoints of I.
  std::vector<GaussianBump1D> warp_fields;

  struct AmplitudeField {
    bool is_constant = true;
    double constant = 0.0;
    GaussianBump1D bump;
    double operator()(double s) const;
  };
  std::vector<AmplitudeField> amplitude_fields;

  double epsilon = 0.0;  // observation noise std dev
  int samples_per_signal = 101;
  int num_signals = 1;
  double T = 1.0;
  int steps = 64;

  // Initial momenta for an evolving template; only zero is supported.
  double u0 = 0.0;
  double nu0 = 0.0;

  void validate() const;
};

struct FdaTable {
  std::vector<double> s;                  // sample grid on [0,1]
  std::vector<std::vector<double>> f;     // [signal][sample]
  std::vector<std::vector<double>> warp;  // phi_i at the sample grid
};

double fda_template_eval(const FdaSpec& spec, double s);
double fda_warp_field_eval(const GaussianBump1D& bump, double s);

FdaTable generate_fda_signals(const FdaSpec& spec, std::uint64_t base_seed,
                              int thread_cap = 0);

}  // namespace metamorph
