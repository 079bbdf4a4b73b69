#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>

namespace langevin {

/// Bumped whenever the sequence produced for a given seed changes.
///
/// Version 1: the seed is passed through one SplitMix64 round and used to
/// construct std::mt19937_64. Each Gaussian pair comes from two 64-bit draws
/// via Box-Muller:
///   u1 = ((a >> 11) + 1) * 2^-53   in (0, 1]
///   u2 =  (b >> 11)      * 2^-53   in [0, 1)
///   z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = sqrt(-2 ln u1) sin(2 pi u2)
/// z0 is returned first, z1 on the following call.
inline constexpr int kGeneratorVersion = 1;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seedable standard-normal source with a fixed, library-independent
/// transform (std::normal_distribution is implementation-defined).
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double operator()() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    constexpr double kScale = 0x1.0p-53;
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
    const double u2 = static_cast<double>(engine_() >> 11) * kScale;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    return r * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

enum class NoiseMode {
  VarianceDt,    // ΔW ~ N(0, dt), the Wiener increment
  UnitVariance,  // ΔW ~ N(0, 1), used for the position/velocity figure series
};

/// One Wiener increment over a step of length dt.
template <typename Source>
double wiener_increment(Source& source, double dt, NoiseMode mode) {
  if (!(dt > 0.0)) throw std::invalid_argument("wiener_increment: dt must be > 0");
  const double z = source();
  return mode == NoiseMode::VarianceDt ? std::sqrt(dt) * z : z;
}

}  // namespace langevin
