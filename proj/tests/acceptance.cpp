// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "langevin/langevin.hpp"
#include "oracles.hpp"

namespace {

using namespace langevin;
using langevin::testing::central_difference;
using langevin::testing::fd_step;
using langevin::testing::rel_err;

struct Outcome {
  bool pass = false;
  std::string detail;
};

PhysicalParams n2(double b = 0.0) { return paper_n2_params(b); }
constexpr double kSpring = N2WaterPreset::spring_constant;

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// The sweep grid: 200 points, 1e-17 .. 4e-15 s.
std::vector<double> default_grid() {
  std::vector<double> g(200);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 1e-17 + (4e-15 - 1e-17) * i / 199.0;
  return g;
}

struct GridCase {
  PhysicalParams p;
  double ks, dt;
};

// >= 100 random stable parameter sets plus the N2 grid's stable points.
std::vector<GridCase> equivalence_cases() {
  std::vector<GridCase> cases;
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + u(gen) * (std::log(hi) - std::log(lo)));
  };
  while (cases.size() < 150) {
    GridCase c{PhysicalParams{log_uniform(1e-25, 1e-21), log_uniform(1e-10, 1e-7),
                              log_uniform(0.5, 20.0), 0.0},
               log_uniform(1e4, 1e7), 0.0};
    c.dt = std::min(c.p.friction / c.ks, 4.0 * c.p.mass / c.p.friction) * log_uniform(1e-3, 0.95);
    if (analyze_stability(c.p, c.ks, c.dt).is_stable) cases.push_back(c);
  }
  for (double dt : default_grid())
    if (analyze_stability(n2(), kSpring, dt).is_stable) cases.push_back({n2(), kSpring, dt});
  return cases;
}

Outcome stability_boundary() {
  const auto t0 = std::chrono::steady_clock::now();
  const double dc = critical_dt(n2(), kSpring);
  const double us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  const bool in_window = dc >= 1.30e-15 && dc <= 1.32e-15;
  const bool value = rel_err(dc, 1.3049e-15) < 1e-4;
  return {in_window && value && us < 1000.0,
          fmt("dt_critical=%.6e s", dc) + fmt(" runtime=%.1f us", us)};
}

Outcome closed_form_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cases = equivalence_cases();
  double worst = 0.0;
  std::size_t n_random = 0;
  for (const auto& c : cases) {
    if (c.p.mass != n2().mass || c.ks != kSpring) ++n_random;
    const auto s = solve_stationary(build_update(c.p, c.ks, c.dt), noise_amplitude(c.p), c.dt);
    const auto f = closed_form_covariance(c.p, c.ks, c.dt);
    worst = std::max({worst, rel_err(s.var_x, f.var_x), rel_err(s.cov_xv, f.cov_xv),
                      rel_err(s.var_v, f.var_v)});
  }
  const double sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-8 && n_random >= 100 && sec < 1.0,
          fmt("cases=%.0f", static_cast<double>(cases.size())) +
              fmt(" random=%.0f", static_cast<double>(n_random)) +
              fmt(" max_rel_err=%.3e", worst) + fmt(" runtime=%.3f s", sec)};
}

Outcome monte_carlo_covariance() {
  const double dt = 5e-16;
  EnsembleConfig ec;
  ec.n_trajectories = 10000;
  ec.burn_in_steps = default_burn_in(n2(), dt);
  ec.sample_stride = 10;
  ec.base_seed = 2011;
  ec.sim = SimulationConfig{dt, 200, 0, NoiseMode::VarianceDt};
  const auto t0 = std::chrono::steady_clock::now();
  const auto est = run_ensemble(State{0.0, 0.0}, n2(), Harmonic{kSpring, 0.0}, ec);
  const double sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto want = closed_form_covariance(n2(), kSpring, dt);
  const double ex = rel_err(est.triple.var_x, want.var_x);
  const double ec_ = rel_err(est.triple.cov_xv, want.cov_xv);
  const double ev = rel_err(est.triple.var_v, want.var_v);
  const bool pass = !est.diverged() && ex <= 0.05 && ec_ <= 0.05 && ev <= 0.05 &&
                    est.triple.cov_xv < 0.0;
  return {pass, fmt("burn_in=%.0f", static_cast<double>(ec.burn_in_steps)) +
                    fmt(" rel_err var_x=%.4f", ex) + fmt(" cov_xv=%.4f", ec_) +
                    fmt(" var_v=%.4f", ev) + fmt(" mu=%.4e", est.triple.cov_xv) +
                    fmt(" runtime=%.2f s", sec)};
}

Outcome divergence_shape() {
  const double dc = critical_dt(n2(), kSpring);
  std::vector<CovarianceTriple> below;
  for (double dt : default_grid())
    if (dt < dc) below.push_back(closed_form_covariance(n2(), kSpring, dt));
  if (below.size() < 11) return {false, "too few grid points below dt_critical"};
  auto increasing = [&](std::size_t from) {
    for (std::size_t i = from + 1; i < below.size(); ++i) {
      if (!(std::abs(below[i].var_x) > std::abs(below[i - 1].var_x))) return false;
      if (!(std::abs(below[i].cov_xv) > std::abs(below[i - 1].cov_xv))) return false;
      if (!(std::abs(below[i].var_v) > std::abs(below[i - 1].var_v))) return false;
    }
    return true;
  };
  const bool last10 = increasing(below.size() - 10);
  const bool steady = increasing(0);
  const double growth = below.back().var_x / below.front().var_x;
  return {last10 && steady, fmt("points_below=%.0f", static_cast<double>(below.size())) +
                                fmt(" last10_monotone=%.0f", last10) +
                                fmt(" all_monotone=%.0f", steady) +
                                fmt(" var_x growth=%.1fx", growth)};
}

double max_abs_x(const Trajectory& t, std::size_t from, std::size_t to, double b) {
  double m = 0.0;
  for (std::size_t k = from; k <= to && k < t.size(); ++k)
    m = std::max(m, std::abs(t.states[k].x - b));
  return m;
}

Outcome damped_oscillation() {
  const double zeta = N2WaterPreset::friction /
                      (2.0 * std::sqrt(kSpring * N2WaterPreset::mass));
  const State start{1e-3, 0.0};
  const SimulationConfig quiet{1e-15, 100, 0, NoiseMode::UnitVariance};
  const auto t = simulate(start, n2(), Harmonic{kSpring, 0.0}, quiet, NoiseAmplitude{0.0});
  std::vector<double> extrema;
  for (std::size_t k = 1; k + 1 < t.size(); ++k) {
    const double a = t.states[k - 1].x, b = t.states[k].x, c = t.states[k + 1].x;
    if ((b - a) * (c - b) < 0.0) extrema.push_back(std::abs(b));
  }
  bool decreasing = extrema.size() >= 4;
  for (std::size_t i = 1; i < extrema.size(); ++i) decreasing &= extrema[i] < extrema[i - 1];

  int damped_runs = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SimulationConfig noisy{1e-15, 100, seed, NoiseMode::UnitVariance};
    const auto r = simulate(start, n2(), Harmonic{kSpring, 0.0}, noisy);
    if (!r.diverged() && max_abs_x(r, 0, 50, 0.0) > max_abs_x(r, 50, 100, 0.0)) ++damped_runs;
  }
  const bool pass = decreasing && std::abs(zeta - 0.286) < 1e-3 && damped_runs >= 95;
  return {pass, fmt("damping_ratio=%.4f", zeta) +
                    fmt(" extrema=%.0f", static_cast<double>(extrema.size())) +
                    fmt(" strictly_decreasing=%.0f", decreasing) +
                    fmt(" noisy_runs_damped=%.0f/100", damped_runs)};
}

Outcome force_energy_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<Potential, double>> cases = {
      {Harmonic{kSpring, 0.11}, 0.05},
      {Morse{945.0, 26.0, 0.11}, 0.05},
      {Cubic{kSpring, -2.0, 0.11}, 0.05},
  };
  double worst = 0.0;
  for (const auto& [pot, half_width] : cases) {
    const double b = bond_length(pot);
    for (int i = 0; i < 1000; ++i) {
      const double x = b - half_width + 2.0 * half_width * (i + 0.5) / 1000.0;
      const double fd =
          -central_difference([&](double y) { return energy(pot, y); }, x, fd_step(x));
      worst = std::max(worst, rel_err(force(pot, x), fd));
    }
  }
  const double sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-5 && sec < 1.0,
          fmt("max_rel_err=%.3e", worst) + fmt(" runtime=%.4f s", sec)};
}

Outcome fixed_point_residual() {
  double worst = 0.0;
  std::size_t n = 0;
  for (const auto& c : equivalence_cases()) {
    const auto eps = noise_amplitude(c.p);
    const auto u = build_update(c.p, c.ks, c.dt);
    const Matrix2 sigma = solve_stationary(u, eps, c.dt).as_matrix();
    const Matrix2 next = propagate_covariance(u, eps, c.dt, sigma);
    const Matrix2 diff{{{next[0][0] - sigma[0][0], next[0][1] - sigma[0][1]},
                        {next[1][0] - sigma[1][0], next[1][1] - sigma[1][1]}}};
    worst = std::max(worst, frobenius_norm(diff) / frobenius_norm(sigma));
    ++n;
  }
  return {worst <= 1e-10, fmt("points=%.0f", static_cast<double>(n)) +
                              fmt(" max_relative_residual=%.3e", worst)};
}

Outcome deterministic_corroboration() {
  const double dc = critical_dt(n2(), kSpring);
  const double omega = std::sqrt(kSpring / N2WaterPreset::mass);
  auto size = [omega](const State& s) { return std::hypot(s.x, s.v / omega); };
  const State start{1e-3, 0.0};
  const Harmonic h{kSpring, 0.0};
  const auto stable =
      simulate(start, n2(), h, SimulationConfig{0.9 * dc, 10000, 0}, NoiseAmplitude{0.0});
  const double ratio = size(stable.states.back()) / size(start);
  const auto unstable =
      simulate(start, n2(), h, SimulationConfig{1.1 * dc, 100000, 0}, NoiseAmplitude{0.0});
  const bool pass = !stable.diverged() && ratio < 1e-6 && unstable.diverged();
  return {pass, fmt("contraction@0.9=%.3e", ratio) +
                    (unstable.diverged()
                         ? fmt(" diverged@1.1 at step %.0f",
                               static_cast<double>(*unstable.diverged_at))
                         : std::string(" no divergence@1.1"))};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 stability boundary in 1.30-1.32e-15 s window", stability_boundary},
      {"2 closed form vs linear solve (rel 1e-8)", closed_form_equivalence},
      {"3 Monte Carlo vs analytic covariance (5%)", monte_carlo_covariance},
      {"4 sweep values grow toward dt_critical", divergence_shape},
      {"5 damped oscillation", damped_oscillation},
      {"6 force matches finite differences (rel 1e-5)", force_energy_consistency},
      {"7 stationary fixed-point residual (1e-10)", fixed_point_residual},
      {"8 noiseless contraction / divergence", deterministic_corroboration},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
