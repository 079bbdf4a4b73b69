#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "langevin/params.hpp"
#include "langevin/potentials.hpp"
#include "langevin/random.hpp"

namespace langevin {

/// |x| or |v| beyond this (or non-finite) counts as numerical blow-up.
inline constexpr double kDivergenceGuard = 1e100;

struct State {
  double x = 0.0;  // nm
  double v = 0.0;  // nm/s

  friend bool operator==(const State&, const State&) = default;
};

struct SimulationConfig {
  double dt = 0.0;
  std::size_t n_steps = 1;
  std::uint64_t seed = 0;
  NoiseMode noise_mode = NoiseMode::VarianceDt;

  void validate() const {
    if (!(std::isfinite(dt) && dt > 0.0))
      throw std::invalid_argument("SimulationConfig: dt must be finite and > 0");
    if (n_steps < 1) throw std::invalid_argument("SimulationConfig: n_steps must be >= 1");
  }
};

struct Trajectory {
  std::vector<double> times;  // times[k] = k * dt
  std::vector<State> states;  // states[0] is the initial state
  /// Index of the step that blew up; the trajectory stops just before it.
  std::optional<std::size_t> diverged_at;

  bool diverged() const { return diverged_at.has_value(); }
  std::size_t size() const { return states.size(); }
};

inline bool within_guard(const State& s) {
  return std::isfinite(s.x) && std::isfinite(s.v) && std::abs(s.x) <= kDivergenceGuard &&
         std::abs(s.v) <= kDivergenceGuard;
}

/// One Euler-Maruyama step of m dv = F(x) dt - eta v dt + eps dW, dx = v dt.
///
/// `noise` is the scaled kick epsilon, so the caller can switch noise off
/// without touching the friction. Returns nullopt on blow-up.
template <ForceField P>
std::optional<State> euler_step(const State& s, const PhysicalParams& p, const P& pot, double dt,
                                double dW, NoiseAmplitude noise) {
  const double inv_m = 1.0 / p.mass;
  State next;
  next.x = s.x + s.v * dt;
  next.v = s.v - p.friction * inv_m * s.v * dt + pot.force(s.x) * inv_m * dt +
           noise.epsilon * inv_m * dW;
  if (!within_guard(next)) return std::nullopt;
  return next;
}

template <ForceField P>
std::optional<State> euler_step(const State& s, const PhysicalParams& p, const P& pot, double dt,
                                double dW) {
  return euler_step(s, p, pot, dt, dW, noise_amplitude(p));
}

inline std::optional<State> euler_step(const State& s, const PhysicalParams& p,
                                       const Potential& pot, double dt, double dW,
                                       NoiseAmplitude noise) {
  return std::visit([&](const auto& v) { return euler_step(s, p, v, dt, dW, noise); }, pot);
}

inline std::optional<State> euler_step(const State& s, const PhysicalParams& p,
                                       const Potential& pot, double dt, double dW) {
  return euler_step(s, p, pot, dt, dW, noise_amplitude(p));
}

/// Integrates n_steps Euler steps from `init`. Deterministic for a given
/// seed, noise mode and kGeneratorVersion. Stops early on divergence.
template <ForceField P>
Trajectory simulate(const State& init, const PhysicalParams& p, const P& pot,
                    const SimulationConfig& cfg, NoiseAmplitude noise) {
  cfg.validate();
  p.validate();
  Trajectory traj;
  traj.times.reserve(cfg.n_steps + 1);
  traj.states.reserve(cfg.n_steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(init);

  GaussianSource source(cfg.seed);
  State s = init;
  for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
    const double dW = wiener_increment(source, cfg.dt, cfg.noise_mode);
    const auto next = euler_step(s, p, pot, cfg.dt, dW, noise);
    if (!next) {
      traj.diverged_at = k;
      break;
    }
    s = *next;
    traj.times.push_back(static_cast<double>(k) * cfg.dt);
    traj.states.push_back(s);
  }
  return traj;
}

template <ForceField P>
Trajectory simulate(const State& init, const PhysicalParams& p, const P& pot,
                    const SimulationConfig& cfg) {
  return simulate(init, p, pot, cfg, noise_amplitude(p));
}

inline Trajectory simulate(const State& init, const PhysicalParams& p, const Potential& pot,
                           const SimulationConfig& cfg, NoiseAmplitude noise) {
  return std::visit([&](const auto& v) { return simulate(init, p, v, cfg, noise); }, pot);
}

inline Trajectory simulate(const State& init, const PhysicalParams& p, const Potential& pot,
                           const SimulationConfig& cfg) {
  return simulate(init, p, pot, cfg, noise_amplitude(p));
}

}  // namespace langevin
