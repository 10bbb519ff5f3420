#include "metamorph/ch2.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace metamorph {

namespace {
// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

std::vector<double> Grid1D::nodes() const {
  std::vector<double> x(N);
  const double h = dx();
  for (int i = 0; i < N; ++i) x[i] = i * h;
  return x;
}

void Grid1D::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw std::invalid_argument("grid: L must be positive");
  }
  if (N < 2 || N % 2 != 0) {
    throw std::invalid_argument("grid: N must be positive and even");
  }
}

struct SpectralGrid::Impl {
  int N = 0;
  int NC = 0;  // N/2 + 1
  double L = 0.0;
  int cutoff = 0;  // highest retained mode under the 2/3 rule
  double* real = nullptr;
  fftw_complex* spec = nullptr;       // analysis result
  fftw_complex* scratch = nullptr;    // synthesis input (destroyed by c2r)
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Impl(const Grid1D& grid) {
    grid.validate();
    N = grid.N;
    NC = N / 2 + 1;
    L = grid.L;
    cutoff = N / 3;
    real = fftw_alloc_real(N);
    spec = fftw_alloc_complex(NC);
    scratch = fftw_alloc_complex(NC);
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fwd = fftw_plan_dft_r2c_1d(N, real, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(N, scratch, real, FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(spec);
    fftw_free(scratch);
  }

  double wavenumber(int j) const { return kTwoPi * j / L; }

  void analyze(std::span<const double> in) {
    std::memcpy(real, in.data(), sizeof(double) * N);
    fftw_execute(fwd);
  }

  // out = ifft(scratch) / N
  void synthesize(std::span<double> out) {
    fftw_execute(bwd);
    const double inv = 1.0 / N;
    for (int i = 0; i < N; ++i) out[i] = real[i] * inv;
  }

  void copy_spec_to_scratch() {
    std::memcpy(scratch, spec, sizeof(fftw_complex) * NC);
  }

  void truncate_scratch(int keep) {
    for (int j = keep + 1; j < NC; ++j) {
      scratch[j][0] = 0.0;
      scratch[j][1] = 0.0;
    }
  }

  // scratch_j *= i k_j, Nyquist zeroed.
  void differentiate_scratch() {
    for (int j = 0; j < NC; ++j) {
      const double k = wavenumber(j);
      const double re = scratch[j][0];
      const double im = scratch[j][1];
      scratch[j][0] = -k * im;
      scratch[j][1] = k * re;
    }
    scratch[NC - 1][0] = 0.0;
    scratch[NC - 1][1] = 0.0;
  }

  void helmholtz_scratch(double alpha, bool invert) {
    for (int j = 0; j < NC; ++j) {
      const double k = wavenumber(j);
      const double factor = 1.0 + alpha * alpha * k * k;
      const double s = invert ? 1.0 / factor : factor;
      scratch[j][0] *= s;
      scratch[j][1] *= s;
    }
  }
};

SpectralGrid::SpectralGrid(const Grid1D& grid) : impl_(std::make_unique<Impl>(grid)) {}
SpectralGrid::~SpectralGrid() = default;

int SpectralGrid::size() const { return impl_->N; }

namespace {

void check_len(const SpectralGrid& g, std::span<const double> in,
               std::span<const double> out) {
  if (static_cast<int>(in.size()) != g.size() ||
      static_cast<int>(out.size()) != g.size()) {
    throw std::invalid_argument("spectral: array length mismatch with grid");
  }
}

}  // namespace

void SpectralGrid::derivative(std::span<const double> in, std::span<double> out) {
  check_len(*this, in, out);
  impl_->analyze(in);
  impl_->copy_spec_to_scratch();
  impl_->differentiate_scratch();
  impl_->synthesize(out);
}

void SpectralGrid::helmholtz(std::span<const double> in, double alpha, bool invert,
                             std::span<double> out) {
  check_len(*this, in, out);
  if (!(alpha > 0.0)) throw std::invalid_argument("helmholtz: alpha must be positive");
  impl_->analyze(in);
  impl_->copy_spec_to_scratch();
  impl_->helmholtz_scratch(alpha, invert);
  impl_->synthesize(out);
}

void SpectralGrid::dealias(std::span<const double> in, std::span<double> out) {
  check_len(*this, in, out);
  impl_->analyze(in);
  impl_->copy_spec_to_scratch();
  impl_->truncate_scratch(impl_->cutoff);
  impl_->synthesize(out);
}

std::vector<double> helmholtz_apply(std::span<const double> u, double alpha,
                                    const Grid1D& grid) {
  SpectralGrid s(grid);
  std::vector<double> m(grid.N);
  s.helmholtz(u, alpha, false, m);
  return m;
}

std::vector<double> helmholtz_invert(std::span<const double> m, double alpha,
                                     const Grid1D& grid) {
  SpectralGrid s(grid);
  std::vector<double> u(grid.N);
  s.helmholtz(m, alpha, true, u);
  return u;
}

namespace {

struct Ch2Fields {
  std::vector<double> m_t, m_x, u_t, u_x, rho_t, rho_x;
};

// Dealiased state fields and their derivatives from one analysis of m and rho.
void prepare_fields(SpectralGrid::Impl& w, const Ch2State& state, Ch2Fields& f) {
  const int N = w.N;
  f.m_t.resize(N);
  f.m_x.resize(N);
  f.u_t.resize(N);
  f.u_x.resize(N);
  f.rho_t.resize(N);
  f.rho_x.resize(N);

  w.analyze(state.m);
  w.copy_spec_to_scratch();
  w.truncate_scratch(w.cutoff);
  w.synthesize(f.m_t);

  w.copy_spec_to_scratch();
  w.truncate_scratch(w.cutoff);
  w.differentiate_scratch();
  w.synthesize(f.m_x);

  w.copy_spec_to_scratch();
  w.truncate_scratch(w.cutoff);
  w.helmholtz_scratch(state.alpha, true);
  w.synthesize(f.u_t);

  w.copy_spec_to_scratch();
  w.truncate_scratch(w.cutoff);
  w.helmholtz_scratch(state.alpha, true);
  w.differentiate_scratch();
  w.synthesize(f.u_x);

  w.analyze(state.rho);
  w.copy_spec_to_scratch();
  w.truncate_scratch(w.cutoff);
  w.synthesize(f.rho_t);

  w.copy_spec_to_scratch();
  w.truncate_scratch(w.cutoff);
  w.differentiate_scratch();
  w.synthesize(f.rho_x);
}

// out = dealias(in)
void product_truncate(SpectralGrid::Impl& w, std::span<const double> in,
                      std::span<double> out) {
  w.analyze(in);
  w.copy_spec_to_scratch();
  w.truncate_scratch(w.cutoff);
  w.synthesize(out);
}

// out = d/dx dealias(in); exact divergence form, zero discrete mean.
void divergence_truncate(SpectralGrid::Impl& w, std::span<const double> in,
                         std::span<double> out) {
  w.analyze(in);
  w.copy_spec_to_scratch();
  w.truncate_scratch(w.cutoff);
  w.differentiate_scratch();
  w.synthesize(out);
}

void check_state(const Ch2State& state, const Grid1D& grid) {
  if (static_cast<int>(state.m.size()) != grid.N ||
      static_cast<int>(state.rho.size()) != grid.N) {
    throw std::invalid_argument("ch2: state length mismatch with grid");
  }
  if (!(state.alpha > 0.0)) throw std::invalid_argument("ch2: alpha must be positive");
}

Ch2Tangent drift_impl(SpectralGrid::Impl& w, const Ch2State& state) {
  const int N = w.N;
  Ch2Fields f;
  prepare_fields(w, state, f);
  std::vector<double> work(N);
  Ch2Tangent tangent;
  tangent.m.resize(N);
  tangent.rho.resize(N);

  // m-tangent = -(u m_x + 2 m u_x) - rho rho_x
  for (int i = 0; i < N; ++i) {
    work[i] = f.u_t[i] * f.m_x[i] + 2.0 * f.m_t[i] * f.u_x[i] + f.rho_t[i] * f.rho_x[i];
  }
  product_truncate(w, work, tangent.m);
  for (int i = 0; i < N; ++i) tangent.m[i] = -tangent.m[i];

  // rho-tangent = -(rho u)_x
  for (int i = 0; i < N; ++i) work[i] = f.rho_t[i] * f.u_t[i];
  divergence_truncate(w, work, tangent.rho);
  for (int i = 0; i < N; ++i) tangent.rho[i] = -tangent.rho[i];
  return tangent;
}

Ch2Tangent diffusion_u_impl(SpectralGrid::Impl& w, const Ch2State& state,
                            std::span<const double> sigma_t,
                            std::span<const double> sigma_x) {
  const int N = w.N;
  Ch2Fields f;
  prepare_fields(w, state, f);
  std::vector<double> work(N);
  Ch2Tangent tangent;
  tangent.m.resize(N);
  tangent.rho.resize(N);

  // m-tangent = -(sigma m_x + 2 m sigma_x)
  for (int i = 0; i < N; ++i) {
    work[i] = sigma_t[i] * f.m_x[i] + 2.0 * f.m_t[i] * sigma_x[i];
  }
  product_truncate(w, work, tangent.m);
  for (int i = 0; i < N; ++i) tangent.m[i] = -tangent.m[i];

  // rho-tangent = -(rho sigma)_x
  for (int i = 0; i < N; ++i) work[i] = f.rho_t[i] * sigma_t[i];
  divergence_truncate(w, work, tangent.rho);
  for (int i = 0; i < N; ++i) tangent.rho[i] = -tangent.rho[i];
  return tangent;
}

Ch2Tangent diffusion_nu_impl(SpectralGrid::Impl& w, const Ch2State& state,
                             std::span<const double> sigma_x) {
  const int N = w.N;
  std::vector<double> rho_t(N), work(N);
  product_truncate(w, state.rho, rho_t);
  Ch2Tangent tangent;
  tangent.m.resize(N);
  tangent.rho.assign(N, 0.0);

  // m-tangent = -rho sigma_x
  for (int i = 0; i < N; ++i) work[i] = rho_t[i] * sigma_x[i];
  product_truncate(w, work, tangent.m);
  for (int i = 0; i < N; ++i) tangent.m[i] = -tangent.m[i];
  return tangent;
}

}  // namespace

Ch2Tangent ch2_drift(const Ch2State& state, const Grid1D& grid) {
  check_state(state, grid);
  SpectralGrid s(grid);
  return drift_impl(s.impl(), state);
}

Ch2Tangent ch2_diffusion_u(const Ch2State& state, const Grid1D& grid,
                           std::span<const double> sigma) {
  check_state(state, grid);
  if (static_cast<int>(sigma.size()) != grid.N) {
    throw std::invalid_argument("ch2: sigma length mismatch with grid");
  }
  SpectralGrid s(grid);
  std::vector<double> sigma_t(grid.N), sigma_x(grid.N);
  s.dealias(sigma, sigma_t);
  SpectralGrid::Impl& w = s.impl();
  divergence_truncate(w, sigma, sigma_x);
  return diffusion_u_impl(w, state, sigma_t, sigma_x);
}

Ch2Tangent ch2_diffusion_nu(const Ch2State& state, const Grid1D& grid,
                            std::span<const double> sigma) {
  check_state(state, grid);
  if (static_cast<int>(sigma.size()) != grid.N) {
    throw std::invalid_argument("ch2: sigma length mismatch with grid");
  }
  SpectralGrid s(grid);
  std::vector<double> sigma_x(grid.N);
  SpectralGrid::Impl& w = s.impl();
  divergence_truncate(w, sigma, sigma_x);
  return diffusion_nu_impl(w, state, sigma_x);
}

Ch2State peakon_init(double c, double x0, double alpha, const Grid1D& grid) {
  grid.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("peakon: alpha must be positive");
  const int N = grid.N;
  const double L = grid.L;
  Ch2State state;
  state.alpha = alpha;
  std::vector<double> u(N);
  const double denom = std::cosh(L / (2.0 * alpha));
  for (int i = 0; i < N; ++i) {
    double dist = std::fmod(std::abs(i * grid.dx() - x0), L);
    if (dist > 0.5 * L) dist = L - dist;
    u[i] = c * std::cosh((dist - 0.5 * L) / alpha) / denom;
  }
  state.m = helmholtz_apply(u, alpha, grid);
  state.rho.assign(N, 0.0);
  return state;
}

Ch2Invariants ch2_invariants(const Ch2State& state, const Grid1D& grid) {
  check_state(state, grid);
  const int N = grid.N;
  const double dx = grid.dx();
  const std::vector<double> u = helmholtz_invert(state.m, state.alpha, grid);
  Ch2Invariants inv;
  for (int i = 0; i < N; ++i) {
    inv.int_m += state.m[i];
    inv.int_rho += state.rho[i];
    inv.h += u[i] * state.m[i] + state.rho[i] * state.rho[i];
  }
  inv.int_m *= dx;
  inv.int_rho *= dx;
  inv.h *= 0.5 * dx;
  return inv;
}

Ch2System::Ch2System(const Grid1D& grid, double alpha, Ch2NoiseSpec noise)
    : grid_(grid), alpha_(alpha), noise_(std::move(noise)) {
  grid_.validate();
  if (!(alpha_ > 0.0)) throw std::invalid_argument("ch2 system: alpha must be positive");
  spectral_ = std::make_unique<SpectralGrid>(grid_);
  SpectralGrid::Impl& w = spectral_->impl();
  auto prep = [&](const std::vector<double>& sigma, std::vector<double>& s_t,
                  std::vector<double>* s_x) {
    if (static_cast<int>(sigma.size()) != grid_.N) {
      throw std::invalid_argument("ch2 system: noise field length mismatch");
    }
    s_t.resize(grid_.N);
    product_truncate(w, sigma, s_t);
    if (s_x) {
      s_x->resize(grid_.N);
      divergence_truncate(w, sigma, *s_x);
    }
  };
  sigma_u_.resize(noise_.sigma_u_fields.size());
  sigma_u_x_.resize(noise_.sigma_u_fields.size());
  for (std::size_t l = 0; l < noise_.sigma_u_fields.size(); ++l) {
    prep(noise_.sigma_u_fields[l], sigma_u_[l], &sigma_u_x_[l]);
  }
  sigma_nu_x_.resize(noise_.sigma_nu_fields.size());
  for (std::size_t k = 0; k < noise_.sigma_nu_fields.size(); ++k) {
    std::vector<double> unused;
    prep(noise_.sigma_nu_fields[k], unused, &sigma_nu_x_[k]);
  }
}

int Ch2System::dim() const { return 2 * grid_.N; }

int Ch2System::channels() const {
  return static_cast<int>(sigma_u_.size() + sigma_nu_x_.size());
}

std::vector<double> Ch2System::pack(const Ch2State& state) const {
  std::vector<double> flat(state.m);
  flat.insert(flat.end(), state.rho.begin(), state.rho.end());
  return flat;
}

Ch2State Ch2System::unpack(std::span<const double> flat) const {
  Ch2State state;
  state.alpha = alpha_;
  state.m.assign(flat.begin(), flat.begin() + grid_.N);
  state.rho.assign(flat.begin() + grid_.N, flat.end());
  return state;
}

void Ch2System::drift(std::span<const double> state, std::span<double> out) const {
  const Ch2State s = unpack(state);
  const Ch2Tangent t = drift_impl(spectral_->impl(), s);
  std::copy(t.m.begin(), t.m.end(), out.begin());
  std::copy(t.rho.begin(), t.rho.end(), out.begin() + grid_.N);
}

void Ch2System::diffusion(std::span<const double> state, int channel,
                          std::span<double> out) const {
  if (channel < 0 || channel >= channels()) {
    throw std::invalid_argument("ch2 system: channel out of range");
  }
  const Ch2State s = unpack(state);
  const int ku = static_cast<int>(sigma_u_.size());
  Ch2Tangent t;
  if (channel < ku) {
    t = diffusion_u_impl(spectral_->impl(), s, sigma_u_[channel],
                         sigma_u_x_[channel]);
  } else {
    t = diffusion_nu_impl(spectral_->impl(), s, sigma_nu_x_[channel - ku]);
  }
  std::copy(t.m.begin(), t.m.end(), out.begin());
  std::copy(t.rho.begin(), t.rho.end(), out.begin() + grid_.N);
}

}  // namespace metamorph
