#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fdsec {

/// Deterministic random source. The engine (std::mt19937_64) is bit-exact by
/// standard; the variate mappings below are hand-rolled because the standard
/// library's distribution objects are implementation-defined and would break
/// byte-identical reproducibility across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Raw 64-bit draw.
  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform phase in [0, 2*pi).
  double phase() { return 2.0 * kPi * uniform(); }

  /// Standard real Gaussian N(0, 1) via Box-Muller.
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]: keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Circularly symmetric complex Gaussian with unit variance (E|z|^2 = 1).
  std::complex<double> cgaussian() {
    const double u1 = 1.0 - uniform();
    const double angle = phase();
    const double radius = std::sqrt(-std::log(u1));
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  /// Unit-magnitude random-phase complex scalar e^{j*theta}.
  std::complex<double> cphase() {
    const double angle = phase();
    return {std::cos(angle), std::sin(angle)};
  }

  /// Derives an independent stream seed from a base seed and an index
  /// (SplitMix64 finalizer over the combination).
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
};

}  // namespace fdsec
