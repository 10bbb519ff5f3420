#pragma once

#include <memory>
#include <span>
#include <vector>

#include "metamorph/sde.hpp"

namespace metamorph {

// Periodic grid on [0, L) with N uniform nodes.
struct Grid1D {
  double L = 1.0;
  int N = 0;

  double dx() const { return L / N; }
  std::vector<double> nodes() const;
  void validate() const;  // L > 0, N positive and even
};

// Momentum density m and template density rho with Helmholtz scale alpha:
// m = u - alpha^2 u_xx.
struct Ch2State {
  std::vector<double> m;
  std::vector<double> rho;
  double alpha = 1.0;
};

struct Ch2NoiseSpec {
  std::vector<std::vector<double>> sigma_u_fields;   // grid functions, size N each
  std::vector<std::vector<double>> sigma_nu_fields;  // grid functions, size N each
};

struct Ch2Tangent {
  std::vector<double> m;
  std::vector<double> rho;
};

struct Ch2Invariants {
  double int_m = 0.0;
  double int_rho = 0.0;
  double h = 0.0;  // 1/2 int (u m + rho^2) dx
};

// FFTW workspace for one grid size. Not copyable; execution of distinct
// instances is safe concurrently (plan creation is internally serialized).
class SpectralGrid {
 public:
  struct Impl;  // defined in ch2.cpp

  explicit SpectralGrid(const Grid1D& grid);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int size() const;
  // Spectral d/dx with the Nyquist mode zeroed.
  void derivative(std::span<const double> in, std::span<double> out);
  // m_k = (1 + alpha^2 k^2) u_k  /  u_k = m_k / (1 + alpha^2 k^2)
  void helmholtz(std::span<const double> in, double alpha, bool invert,
                 std::span<double> out);
  // 2/3-rule truncation: zero modes with index > N/3.
  void dealias(std::span<const double> in, std::span<double> out);

  Impl& impl() { return *impl_; }

 private:
  std::unique_ptr<Impl> impl_;
};

std::vector<double> helmholtz_apply(std::span<const double> u, double alpha,
                                    const Grid1D& grid);
std::vector<double> helmholtz_invert(std::span<const double> m, double alpha,
                                     const Grid1D& grid);

// Deterministic right-hand side:
//   m-tangent = -(u m_x + 2 m u_x) - rho rho_x,  rho-tangent = -(rho u)_x
// with u = helmholtz_invert(m); spectral derivatives, 2/3-rule dealiasing.
Ch2Tangent ch2_drift(const Ch2State& state, const Grid1D& grid);

// Deformation channel: m-tangent = -(sigma m_x + 2 m sigma_x),
// rho-tangent = -(rho sigma)_x.
Ch2Tangent ch2_diffusion_u(const Ch2State& state, const Grid1D& grid,
                           std::span<const double> sigma);

// Template channel: m-tangent = -rho sigma_x, rho-tangent = 0.
Ch2Tangent ch2_diffusion_nu(const Ch2State& state, const Grid1D& grid,
                            std::span<const double> sigma);

// Periodic peakon profile u(x) = c cosh((dist(x,x0) - L/2)/alpha) / cosh(L/(2 alpha)),
// m by spectral Helmholtz, rho = 0.
Ch2State peakon_init(double c, double x0, double alpha, const Grid1D& grid);

Ch2Invariants ch2_invariants(const Ch2State& state, const Grid1D& grid);

// Flat-state adapter: state = [m; rho]. Channels: deformation fields first,
// then template fields. Owns its spectral workspace, so distinct instances
// may integrate concurrently.
class Ch2System : public SdeSystem {
 public:
  Ch2System(const Grid1D& grid, double alpha, Ch2NoiseSpec noise);

  int dim() const override;
  int channels() const override;
  void drift(std::span<const double> state, std::span<double> out) const override;
  void diffusion(std::span<const double> state, int channel,
                 std::span<double> out) const override;

  std::vector<double> pack(const Ch2State& state) const;
  Ch2State unpack(std::span<const double> flat) const;
  const Grid1D& grid() const { return grid_; }
  double alpha() const { return alpha_; }

 private:
  Grid1D grid_;
  double alpha_;
  Ch2NoiseSpec noise_;
  // Truncated channel fields and their derivatives, precomputed.
  std::vector<std::vector<double>> sigma_u_, sigma_u_x_, sigma_nu_x_;
  std::unique_ptr<SpectralGrid> spectral_;
};

}  // namespace metamorph
