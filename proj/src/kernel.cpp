#include "metamorph/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace metamorph {

namespace {

void check_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("kernel: non-finite input component");
    }
  }
}

}  // namespace

void KernelSpec::validate() const {
  if (!(length_scale > 0.0) || !std::isfinite(length_scale)) {
    throw std::invalid_argument("kernel: length_scale must be positive");
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("kernel: amplitude must be positive");
  }
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x) {
  check_finite(x);
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double s = spec.length_scale;
  return spec.amplitude * std::exp(-r2 / (2.0 * s * s));
}

void kernel_grad(const KernelSpec& spec, std::span<const double> x,
                 std::span<double> out) {
  const double k = kernel_eval(spec, x);
  const double inv_s2 = 1.0 / (spec.length_scale * spec.length_scale);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = -x[i] * inv_s2 * k;
  }
}

}  // namespace metamorph
