#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace langevin {

// Unit system throughout: pN, nm, s. Energies are pN·nm.

/// Physical description of the molecule and its solvent.
struct PhysicalParams {
  double mass = 0.0;            // pN·s²/nm
  double friction = 0.0;        // pN·s/nm
  double thermal_energy = 0.0;  // pN·nm (kT)
  double bond_length = 0.0;     // nm

  /// Throws std::invalid_argument unless mass > 0 and the rest are
  /// finite and non-negative.
  void validate() const {
    if (!(std::isfinite(mass) && mass > 0.0))
      throw std::invalid_argument("PhysicalParams: mass must be finite and > 0");
    if (!(std::isfinite(friction) && friction >= 0.0))
      throw std::invalid_argument("PhysicalParams: friction must be finite and >= 0");
    if (!(std::isfinite(thermal_energy) && thermal_energy >= 0.0))
      throw std::invalid_argument(
          "PhysicalParams: thermal_energy must be finite and >= 0");
    if (!(std::isfinite(bond_length) && bond_length >= 0.0))
      throw std::invalid_argument("PhysicalParams: bond_length must be finite and >= 0");
  }
};

/// Amplitude of the random force. epsilon * dW carries momentum units.
struct NoiseAmplitude {
  double epsilon = 0.0;

  double squared() const { return epsilon * epsilon; }
};

/// Stokes drag on a sphere of the given radius in a fluid of the given
/// viscosity: 6*pi*viscosity*radius.
inline double stokes_friction(double viscosity, double radius) {
  if (viscosity < 0.0 || radius < 0.0)
    throw std::invalid_argument("stokes_friction: arguments must be >= 0");
  return 6.0 * std::numbers::pi * viscosity * radius;
}

/// Fluctuation-dissipation amplitude, epsilon^2 = 2 * friction * mass * kT.
///
/// Note that the mass factor makes the Δt→0 velocity variance equal to kT
/// rather than kT/m. The closed-form stationary covariance in covariance.hpp
/// is consistent with this convention, so it is kept as is.
inline NoiseAmplitude noise_amplitude(const PhysicalParams& p) {
  return NoiseAmplitude{std::sqrt(2.0 * p.friction * p.mass * p.thermal_energy)};
}

/// N2 in water at room temperature.
struct N2WaterPreset {
  static constexpr double mass = 1.16265e-23;      // pN·s²/nm
  static constexpr double friction = 2.9229e-9;    // pN·s/nm
  static constexpr double thermal_energy = 4.1;    // pN·nm
  static constexpr double spring_constant = 2.24e6;  // pN/nm
};

/// Parameters of N2 in water. The bond length is not part of the data set;
/// callers pass it explicitly (0 means the coordinate is the bond
/// fluctuation itself).
inline PhysicalParams paper_n2_params(double bond_length) {
  return PhysicalParams{N2WaterPreset::mass, N2WaterPreset::friction,
                        N2WaterPreset::thermal_energy, bond_length};
}

inline constexpr double n2_spring_constant() { return N2WaterPreset::spring_constant; }

}  // namespace langevin
