#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "langevin/covariance.hpp"
#include "langevin/params.hpp"

namespace langevin {

/// Jury conditions for the characteristic polynomial
/// P(z) = z^2 - tr(C) z + det(C). All three positive <=> both roots inside
/// the unit circle.
struct JuryMargins {
  double one_minus_det = 0.0;  // 1 - det C
  double at_plus_one = 0.0;    // P(+1) = 1 - tr C + det C
  double at_minus_one = 0.0;   // P(-1) = 1 + tr C + det C

  bool all_positive() const { return one_minus_det > 0.0 && at_plus_one > 0.0 && at_minus_one > 0.0; }
};

struct StabilityReport {
  bool paper_condition_holds = false;  // k_s dt^2 < eta dt
  double determinant = 0.0;
  double trace = 0.0;
  bool complex_eigenvalues = false;
  double spectral_radius = 0.0;
  /// Decided by the Jury conditions, which are exact polynomial tests;
  /// equivalent to spectral_radius < 1 up to rounding at the boundary.
  bool is_stable = false;
  double dt_critical = 0.0;
  JuryMargins jury;
};

/// Largest step for which k_s dt^2 < eta dt, i.e. eta / k_s.
inline double critical_dt(const PhysicalParams& p, double spring_constant) {
  if (!(spring_constant > 0.0)) throw std::invalid_argument("critical_dt: k_s must be > 0");
  return p.friction / spring_constant;
}

/// Spectral radius of a real 2x2 matrix from its trace and determinant.
inline double spectral_radius_2x2(double trace, double det) {
  const double disc = trace * trace - 4.0 * det;
  if (disc < 0.0) return std::sqrt(det);
  const double root = std::sqrt(disc);
  // Avoid cancellation in the smaller root.
  const double big = 0.5 * (trace + std::copysign(root, trace));
  const double small = big != 0.0 ? det / big : 0.0;
  return std::max(std::abs(big), std::abs(small));
}

inline StabilityReport analyze_stability(const PhysicalParams& p, double spring_constant,
                                         double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("analyze_stability: dt must be > 0");
  const UpdateMatrices u = build_update(p, spring_constant, dt);
  const Matrix2& c = u.C;

  StabilityReport r;
  r.dt_critical = critical_dt(p, spring_constant);
  r.paper_condition_holds = spring_constant * dt * dt < p.friction * dt;
  r.determinant = c[0][0] * c[1][1] - c[0][1] * c[1][0];
  r.trace = c[0][0] + c[1][1];
  r.complex_eigenvalues = r.trace * r.trace < 4.0 * r.determinant;
  r.spectral_radius = spectral_radius_2x2(r.trace, r.determinant);
  r.jury = JuryMargins{1.0 - r.determinant, 1.0 - r.trace + r.determinant,
                       1.0 + r.trace + r.determinant};
  r.is_stable = r.jury.all_positive();
  return r;
}

}  // namespace langevin
