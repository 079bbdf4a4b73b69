#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <variant>

namespace langevin {

/// V(x) = k_s/2 (x - b)^2
struct Harmonic {
  double spring_constant = 0.0;  // pN/nm
  double bond_length = 0.0;      // nm

  double energy(double x) const {
    const double d = x - bond_length;
    return 0.5 * spring_constant * d * d;
  }
  double force(double x) const { return -spring_constant * (x - bond_length); }
};

/// V(x) = D [1 - exp(-beta (x - b))]^2
///
/// D is stored in whatever energy unit the caller uses; it must be pN·nm for
/// the integrator's units to be consistent.
struct Morse {
  double depth = 0.0;        // energy
  double steepness = 0.0;    // 1/nm
  double bond_length = 0.0;  // nm

  double energy(double x) const {
    const double s = 1.0 - std::exp(-steepness * (x - bond_length));
    return depth * s * s;
  }
  double force(double x) const {
    const double e = std::exp(-steepness * (x - bond_length));
    return -2.0 * depth * steepness * e * (1.0 - e);
  }
};

/// V(x) = k_s (x - b)^2 + k_s k_c (x - b)^3, the GROMACS cubic bond stretch.
struct Cubic {
  double spring_constant = 0.0;  // pN/nm
  double cubic_constant = 0.0;   // 1/nm
  double bond_length = 0.0;      // nm

  double energy(double x) const {
    const double d = x - bond_length;
    return spring_constant * d * d + spring_constant * cubic_constant * d * d * d;
  }
  double force(double x) const {
    const double d = x - bond_length;
    return -(2.0 * spring_constant * d + 3.0 * spring_constant * cubic_constant * d * d);
  }
};

using Potential = std::variant<Harmonic, Morse, Cubic>;

/// Anything the integrator can take a force from.
template <typename P>
concept ForceField = requires(const P& p, double x) {
  { p.force(x) } -> std::convertible_to<double>;
  { p.energy(x) } -> std::convertible_to<double>;
};

inline double energy(const Potential& p, double x) {
  return std::visit([x](const auto& v) { return v.energy(x); }, p);
}

inline double force(const Potential& p, double x) {
  return std::visit([x](const auto& v) { return v.force(x); }, p);
}

inline double energy(const ForceField auto& p, double x) { return p.energy(x); }
inline double force(const ForceField auto& p, double x) { return p.force(x); }

inline double bond_length(const Potential& p) {
  return std::visit([](const auto& v) { return v.bond_length; }, p);
}

inline std::string_view potential_name(const Potential& p) {
  struct Namer {
    std::string_view operator()(const Harmonic&) const { return "harmonic"; }
    std::string_view operator()(const Morse&) const { return "morse"; }
    std::string_view operator()(const Cubic&) const { return "cubic"; }
  };
  return std::visit(Namer{}, p);
}

inline void validate(const Potential& p) {
  struct Check {
    void operator()(const Harmonic& h) const {
      if (!(h.spring_constant > 0.0))
        throw std::invalid_argument("Harmonic: spring constant must be > 0");
      if (!(h.bond_length >= 0.0))
        throw std::invalid_argument("Harmonic: bond length must be >= 0");
    }
    void operator()(const Morse& m) const {
      if (!(m.depth > 0.0) || !(m.steepness > 0.0))
        throw std::invalid_argument("Morse: depth and steepness must be > 0");
      if (!(m.bond_length >= 0.0))
        throw std::invalid_argument("Morse: bond length must be >= 0");
    }
    void operator()(const Cubic& c) const {
      if (!(c.spring_constant > 0.0))
        throw std::invalid_argument("Cubic: spring constant must be > 0");
      if (!std::isfinite(c.cubic_constant))
        throw std::invalid_argument("Cubic: cubic constant must be finite");
      if (!(c.bond_length >= 0.0))
        throw std::invalid_argument("Cubic: bond length must be >= 0");
    }
  };
  std::visit(Check{}, p);
}

}  // namespace langevin
