#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <vector>

#include "langevin/covariance.hpp"
#include "langevin/integrator.hpp"
#include "langevin/stability.hpp"

namespace langevin {

/// Requested step lies outside the stable region of the Euler map.
class UnstableStepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnsembleConfig {
  std::size_t n_trajectories = 2;
  std::size_t burn_in_steps = 0;
  std::size_t sample_stride = 1;
  std::uint64_t base_seed = 0;
  /// dt and noise mode; n_steps is the sampled segment that follows the
  /// burn-in. The seed field is ignored (trajectory i uses base_seed + i).
  SimulationConfig sim;
  /// Skip the stability precondition (harmonic potentials only check it).
  bool allow_unstable = false;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;

  void validate() const {
    if (n_trajectories < 2)
      throw std::invalid_argument("EnsembleConfig: need at least 2 trajectories");
    if (sample_stride < 1) throw std::invalid_argument("EnsembleConfig: sample_stride must be >= 1");
    sim.validate();
  }

  std::size_t samples_per_trajectory() const { return sim.n_steps / sample_stride + 1; }
};

struct EnsembleEstimate {
  double mean_x = 0.0;
  double mean_v = 0.0;
  CovarianceTriple triple;
  double stderr_var_x = 0.0;
  double stderr_var_v = 0.0;
  double stderr_cov = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_trajectories_used = 0;
  std::size_t n_diverged = 0;

  bool diverged() const { return n_diverged > 0; }
};

/// Velocity relaxation time m / eta.
inline double equilibration_time(const PhysicalParams& p) {
  if (!(p.friction > 0.0))
    throw std::invalid_argument("equilibration_time: friction must be > 0");
  return p.mass / p.friction;
}

/// Burn-in of 20 velocity relaxation times, in steps.
inline std::size_t default_burn_in(const PhysicalParams& p, double dt) {
  return static_cast<std::size_t>(std::ceil(20.0 * equilibration_time(p) / dt));
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

inline double sample_stddev(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double q : values) mean += q;
  mean /= n;
  double ss = 0.0;
  for (double q : values) ss += (q - mean) * (q - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace detail

/// Runs n_trajectories independent trajectories and estimates the
/// stationary mean and covariance across the ensemble.
///
/// Samples are taken at steps burn_in + j * stride. Means are pooled over
/// all samples and subtracted; the covariance triple uses the N - 1
/// denominator. Standard errors come from the spread of per-trajectory
/// estimates, which are independent even when samples inside one trajectory
/// are correlated. Results do not depend on the thread count.
template <ForceField P>
EnsembleEstimate run_ensemble(const State& init, const PhysicalParams& p, const P& pot,
                              const EnsembleConfig& ec, NoiseAmplitude noise) {
  ec.validate();
  p.validate();
  if constexpr (std::is_same_v<P, Harmonic>) {
    if (!ec.allow_unstable && !analyze_stability(p, pot.spring_constant, ec.sim.dt).is_stable)
      throw UnstableStepError("run_ensemble: dt is outside the stable region");
  }

  const std::size_t n = ec.n_trajectories;
  const std::size_t k = ec.samples_per_trajectory();
  std::vector<double> xs(n * k), vs(n * k);
  std::vector<char> ok(n, 0);

  detail::parallel_for(n, ec.threads, [&](std::size_t i) {
    SimulationConfig cfg = ec.sim;
    cfg.n_steps = ec.burn_in_steps + ec.sim.n_steps;
    cfg.seed = ec.base_seed + i;
    GaussianSource source(cfg.seed);
    State s = init;
    std::size_t next_sample = ec.burn_in_steps;
    std::size_t j = 0;
    for (std::size_t step = 0;; ++step) {
      if (step == next_sample) {
        xs[i * k + j] = s.x;
        vs[i * k + j] = s.v;
        ++j;
        next_sample += ec.sample_stride;
        if (j == k) break;
      }
      const double dW = wiener_increment(source, cfg.dt, cfg.noise_mode);
      const auto next = euler_step(s, p, pot, cfg.dt, dW, noise);
      if (!next) return;
      s = *next;
    }
    ok[i] = 1;
  });

  EnsembleEstimate est;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < n; ++i) {
    if (ok[i])
      used.push_back(i);
    else
      ++est.n_diverged;
  }
  est.n_trajectories_used = used.size();
  if (used.size() < 2) return est;

  // Fluctuations can be ~1e-13 of the bond length, so sums run over
  // offsets from a reference sample rather than raw positions.
  const double ref_x = xs[used.front() * k];
  const double ref_v = vs[used.front() * k];
  const double total = static_cast<double>(used.size() * k);
  double sx = 0.0, sv = 0.0;
  for (std::size_t i : used)
    for (std::size_t j = 0; j < k; ++j) {
      sx += xs[i * k + j] - ref_x;
      sv += vs[i * k + j] - ref_v;
    }
  const double off_x = sx / total, off_v = sv / total;
  est.mean_x = ref_x + off_x;
  est.mean_v = ref_v + off_v;

  std::vector<double> qxx, qxv, qvv;
  qxx.reserve(used.size());
  qxv.reserve(used.size());
  qvv.reserve(used.size());
  double sxx = 0.0, sxv = 0.0, svv = 0.0;
  for (std::size_t i : used) {
    double txx = 0.0, txv = 0.0, tvv = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double dx = (xs[i * k + j] - ref_x) - off_x;
      const double dv = (vs[i * k + j] - ref_v) - off_v;
      txx += dx * dx;
      txv += dx * dv;
      tvv += dv * dv;
    }
    sxx += txx;
    sxv += txv;
    svv += tvv;
    const double kk = static_cast<double>(k);
    qxx.push_back(txx / kk);
    qxv.push_back(txv / kk);
    qvv.push_back(tvv / kk);
  }
  est.triple = CovarianceTriple{sxx / (total - 1.0), sxv / (total - 1.0), svv / (total - 1.0)};
  const double root_n = std::sqrt(static_cast<double>(used.size()));
  est.stderr_var_x = detail::sample_stddev(qxx) / root_n;
  est.stderr_cov = detail::sample_stddev(qxv) / root_n;
  est.stderr_var_v = detail::sample_stddev(qvv) / root_n;
  est.n_samples = used.size() * k;
  return est;
}

template <ForceField P>
EnsembleEstimate run_ensemble(const State& init, const PhysicalParams& p, const P& pot,
                              const EnsembleConfig& ec) {
  return run_ensemble(init, p, pot, ec, noise_amplitude(p));
}

inline EnsembleEstimate run_ensemble(const State& init, const PhysicalParams& p,
                                     const Potential& pot, const EnsembleConfig& ec,
                                     NoiseAmplitude noise) {
  return std::visit([&](const auto& v) { return run_ensemble(init, p, v, ec, noise); }, pot);
}

inline EnsembleEstimate run_ensemble(const State& init, const PhysicalParams& p,
                                     const Potential& pot, const EnsembleConfig& ec) {
  return run_ensemble(init, p, pot, ec, noise_amplitude(p));
}

}  // namespace langevin
