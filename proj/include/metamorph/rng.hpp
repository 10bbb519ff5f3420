#pragma once

#include <cmath>
#include <cstdint>

namespace metamorph::rng {

// SplitMix64 finalizer. Counter-based generation: the i-th output of a
// stream is mix64(stream + gamma*(i+1)), a pure function of (stream, i),
// so increments can be produced in any order on any schedule.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// Independent stream seed for (base, index). The salt separates uses
// (realizations vs channels vs observation noise).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index,
                                    std::uint64_t salt = 0) {
  return mix64(mix64(base ^ (salt * 0xD1B54A32D192ED03ull)) + kGamma * (index + 1));
}

constexpr std::uint64_t stream_word(std::uint64_t stream, std::uint64_t i) {
  return mix64(stream + kGamma * (i + 1));
}

// Uniform in [0,1) from a 64-bit word.
inline double uniform01(std::uint64_t w) {
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

// Standard normal as a pure function of (stream, counter), via Box-Muller.
inline double standard_normal(std::uint64_t stream, std::uint64_t counter) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  // u1 in (0,1] so the log is finite.
  const double u1 =
      (static_cast<double>(stream_word(stream, 2 * counter) >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01(stream_word(stream, 2 * counter + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace metamorph::rng
