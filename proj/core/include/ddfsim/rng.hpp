#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace ddfsim {

/// Counter-derived pseudorandom stream (splitmix64 core).
///
/// Every Monte Carlo trial owns independent streams derived from
/// (master seed, trial index, substream id), so results do not depend on
/// how trials are distributed over workers.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  static Rng derive(std::uint64_t seed, std::uint64_t trial, std::uint64_t substream) {
    std::uint64_t s = mix(seed + 0x9e3779b97f4a7c15ULL * (trial + 1));
    s = mix(s ^ (0xbf58476d1ce4e5b9ULL * (substream + 1)));
    return Rng(s);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the second deviate of each pair is cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    auto [a, b] = gaussian_pair();
    cached_ = b;
    have_cached_ = true;
    return a;
  }

  /// Circularly-symmetric complex Gaussian with total variance `variance`.
  std::complex<double> cgaussian(double variance) {
    auto [a, b] = gaussian_pair();
    const double s = std::sqrt(variance / 2.0);
    return {s * a, s * b};
  }

  std::uint64_t state() const { return state_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::pair<double, double> gaussian_pair() {
    // u1 in (0,1] keeps the log finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace ddfsim
