#pragma once

#include <span>

namespace metamorph {

enum class KernelFamily { gaussian };

// Scalar reproducing kernel acting diagonally on vector components.
// K(x) = g * exp(-|x|^2 / (2 r^2)).
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double length_scale = 1.0;  // r > 0
  double amplitude = 1.0;     // g > 0

  void validate() const;  // throws std::invalid_argument
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x);

// grad K(x) = -(x / r^2) K(x); antisymmetric in x.
void kernel_grad(const KernelSpec& spec, std::span<const double> x,
                 std::span<double> out);

}  // namespace metamorph
