#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "langevin/integrator.hpp"
#include "langevin/params.hpp"

namespace langevin {

using Vector2 = std::array<double, 2>;
using Matrix2 = std::array<std::array<double, 2>, 2>;

inline Matrix2 multiply(const Matrix2& a, const Matrix2& b) {
  Matrix2 r{};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

inline Matrix2 transpose(const Matrix2& a) { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

inline Vector2 mat_vec(const Matrix2& a, const Vector2& x) {
  return {a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]};
}

inline double frobenius_norm(const Matrix2& a) {
  return std::hypot(std::hypot(a[0][0], a[0][1]), std::hypot(a[1][0], a[1][1]));
}

/// Matrices of the discrete update  s' = C s + eps B dW + drift_offset.
struct UpdateMatrices {
  Matrix2 C{};
  Vector2 B{};
  Vector2 drift_offset{};  // k_s b B dt
  Matrix2 A{};             // continuous drift matrix, C = I + dt A for Euler
};

/// Euler update matrices for the harmonic bond with spring constant k_s.
inline UpdateMatrices build_update(const PhysicalParams& p, double spring_constant, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("build_update: dt must be > 0");
  p.validate();
  UpdateMatrices u;
  u.A = {{{0.0, 1.0}, {-spring_constant / p.mass, -p.friction / p.mass}}};
  u.C = {{{1.0, dt}, {-spring_constant * dt / p.mass, 1.0 - p.friction * dt / p.mass}}};
  u.B = {0.0, 1.0 / p.mass};
  u.drift_offset = {0.0, spring_constant * p.bond_length * u.B[1] * dt};
  return u;
}

/// The affine map's fixed point, which is the stationary mean.
inline State stationary_mean(const PhysicalParams& p) { return State{p.bond_length, 0.0}; }

/// (sigma_x^2, mu, sigma_v^2): position variance, position-velocity
/// covariance, velocity variance.
struct CovarianceTriple {
  double var_x = 0.0;
  double cov_xv = 0.0;
  double var_v = 0.0;

  Matrix2 as_matrix() const { return {{{var_x, cov_xv}, {cov_xv, var_v}}}; }
};

/// The expanded stationary-covariance system is (numerically) singular.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form denominator vanishes.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Reciprocal 1-norm condition number below which solve_stationary refuses.
inline constexpr double kMinReciprocalCondition = 1e-10;

/// Relative distance |1 - k_s dt / eta| inside which the closed form refuses.
inline constexpr double kPoleTolerance = 1e-4;

/// One step of covariance propagation: C Sigma C^T + eps^2 B B^T dt.
inline Matrix2 propagate_covariance(const UpdateMatrices& u, NoiseAmplitude eps, double dt,
                                    const Matrix2& sigma) {
  Matrix2 r = multiply(multiply(u.C, sigma), transpose(u.C));
  const double q = eps.squared() * dt;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) r[i][j] += q * u.B[i] * u.B[j];
  return r;
}

namespace detail {

using Matrix3 = std::array<std::array<double, 3>, 3>;
using Vector3 = std::array<double, 3>;

inline double one_norm(const Matrix3& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < 3; ++j)
    best = std::max(best, std::abs(m[0][j]) + std::abs(m[1][j]) + std::abs(m[2][j]));
  return best;
}

inline double determinant(const Matrix3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// 1/(|M|_1 |M^-1|_1), with the inverse from the adjugate.
inline double reciprocal_condition(const Matrix3& m) {
  const double det = determinant(m);
  if (det == 0.0 || !std::isfinite(det)) return 0.0;
  Matrix3 inv{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const std::size_t r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const std::size_t c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
    }
  }
  const double norm = one_norm(m) * one_norm(inv);
  return norm > 0.0 ? 1.0 / norm : 0.0;
}

// Gaussian elimination with partial pivoting.
inline Vector3 solve3(Matrix3 m, Vector3 rhs) {
  for (std::size_t col = 0; col < 3; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (m[pivot][col] == 0.0) throw SingularSystemError("solve3: zero pivot");
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  Vector3 x{};
  for (std::size_t i = 3; i-- > 0;) {
    double acc = rhs[i];
    for (std::size_t c = i + 1; c < 3; ++c) acc -= m[i][c] * x[c];
    x[i] = acc / m[i][i];
  }
  return x;
}

}  // namespace detail

/// Solves Sigma = C Sigma C^T + eps^2 B B^T dt for the symmetric 2x2 Sigma,
/// written as the 3x3 linear system in (sigma_x^2, mu, sigma_v^2).
///
/// Position and velocity differ by ~15 orders of magnitude in these units, so
/// the system is assembled for the balanced matrix D^-1 C D with
/// D = diag(sqrt|c12/c21|, 1) and the result is scaled back. Throws
/// SingularSystemError when the balanced system's reciprocal condition number
/// drops below kMinReciprocalCondition, which happens at the stability
/// boundary where an eigenvalue product of C reaches 1.
inline CovarianceTriple solve_stationary(const UpdateMatrices& u, NoiseAmplitude eps, double dt) {
  double scale = 1.0;
  if (u.C[0][1] != 0.0 && u.C[1][0] != 0.0) {
    scale = std::sqrt(std::abs(u.C[0][1] / u.C[1][0]));
    if (!std::isfinite(scale) || scale == 0.0) scale = 1.0;
  }
  const double c11 = u.C[0][0];
  const double c12 = u.C[0][1] / scale;
  const double c21 = u.C[1][0] * scale;
  const double c22 = u.C[1][1];
  const double b1 = u.B[0] / scale;
  const double b2 = u.B[1];

  const detail::Matrix3 m{{
      {c11 * c11 - 1.0, 2.0 * c11 * c12, c12 * c12},
      {c11 * c21, c11 * c22 + c12 * c21 - 1.0, c12 * c22},
      {c21 * c21, 2.0 * c21 * c22, c22 * c22 - 1.0},
  }};
  const double q = -eps.squared() * dt;
  const detail::Vector3 rhs{q * b1 * b1, q * b1 * b2, q * b2 * b2};

  if (detail::reciprocal_condition(m) < kMinReciprocalCondition)
    throw SingularSystemError("solve_stationary: system is singular (stability boundary)");

  const auto sol = detail::solve3(m, rhs);
  return CovarianceTriple{sol[0] * scale * scale, sol[1] * scale, sol[2]};
}

/// Closed-form stationary covariance of the Euler scheme for the harmonic
/// bond. Throws PoleError when dt is within kPoleTolerance (relative) of
/// friction / k_s, or when the quadratic denominator factor vanishes.
///
/// The formulas hold past the pole too, where they are no longer a
/// covariance (signs flip); check stability separately.
inline CovarianceTriple closed_form_covariance(const PhysicalParams& p, double spring_constant,
                                               double dt) {
  p.validate();
  const double m = p.mass, eta = p.friction, kT = p.thermal_energy, ks = spring_constant;
  const double linear = eta - ks * dt;
  const double quadratic = 4.0 * m * ks - 2.0 * ks * eta * dt + ks * ks * dt * dt;
  if (std::abs(linear) <= kPoleTolerance * std::max(eta, ks * dt))
    throw PoleError("closed_form_covariance: dt is at the pole friction / k_s");
  if (std::abs(quadratic) <= 1e-12 * std::abs(4.0 * m * ks) || quadratic == 0.0)
    throw PoleError("closed_form_covariance: quadratic denominator vanishes");
  const double denom = linear * quadratic;
  return CovarianceTriple{
      2.0 * eta * kT * m * (2.0 * m - eta * dt + ks * dt * dt) / denom,
      -2.0 * eta * kT * m * dt * ks / denom,
      4.0 * eta * kT * m * ks / denom,
  };
}

}  // namespace langevin
