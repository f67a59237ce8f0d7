#pragma once

#include <cmath>
#include <cstdint>

namespace cmlm {

/// Counter-based splittable generator. Each (seed, stream) pair owns an
/// independent sequence; draw n is a pure hash of (seed, stream, n), so
/// output never depends on the order streams are consumed in and every
/// stream can be handed to a different worker. The mixer is the SplitMix64
/// finalizer over a Weyl sequence.
///
/// Distribution sampling is implemented here rather than with the <random>
/// distribution templates; those are implementation-defined, and synthetic
/// datasets must be reproducible byte-for-byte across toolchains.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed ^ 0x243f6a8885a308d3ULL) ^ mix(stream))) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kWeyl); }

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double next_normal() {
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Exponential with unit rate.
  double next_exponential() { return -std::log(1.0 - next_double()); }

  /// Uniform integer in [0, n). n must be >= 1 and far below 2^53.
  std::uint64_t next_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(n)) % n;
  }

 private:
  static constexpr std::uint64_t kWeyl = 0x9e3779b97f4a7c15ULL;
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t mix(std::uint64_t z) {
    z += kWeyl;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cmlm
