#pragma once

// Command-line front end: simulate, covariance-sweep, stability, verify.
// Kept in a header so the tests can drive it in-process.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "langevin/langevin.hpp"

namespace langevin::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kUsage = 2,
  kDiverged = 3,
  kUnstable = 4,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string preset;
  std::optional<double> mass, eta, kT, ks;
  double bond_length = 0.0;
  std::string potential = "harmonic";
  std::optional<double> morse_depth, morse_beta, kc;
  std::optional<double> x0;
  double v0 = 0.0;

  std::optional<double> dt;
  std::optional<std::size_t> steps;
  std::uint64_t seed = 0;
  std::string noise = "variance-dt";

  std::size_t ensemble = 10000;
  std::optional<std::size_t> burn_in;
  std::size_t stride = 10;
  unsigned threads = 0;
  double tolerance = 0.05;
  bool zero_noise = false;

  double dt_min = 1e-17;
  double dt_max = 4e-15;
  std::size_t points = 200;
  bool grid = false;

  std::string out;
};

struct Resolved {
  PhysicalParams params;
  double spring_constant = 0.0;
  Potential potential;
  NoiseMode noise_mode = NoiseMode::VarianceDt;
  State init;
};

inline Resolved resolve(const Options& o) {
  Resolved r;
  double mass = 0, eta = 0, kT = 0, ks = 0;
  bool have_mass = false, have_eta = false, have_kT = false, have_ks = false;
  if (o.preset == "n2-water") {
    mass = N2WaterPreset::mass;
    eta = N2WaterPreset::friction;
    kT = N2WaterPreset::thermal_energy;
    ks = N2WaterPreset::spring_constant;
    have_mass = have_eta = have_kT = have_ks = true;
  } else if (!o.preset.empty()) {
    throw UsageError("unknown preset '" + o.preset + "' (available: n2-water)");
  }
  if (o.mass) mass = *o.mass, have_mass = true;
  if (o.eta) eta = *o.eta, have_eta = true;
  if (o.kT) kT = *o.kT, have_kT = true;
  if (o.ks) ks = *o.ks, have_ks = true;
  if (!have_mass || !have_eta || !have_kT)
    throw UsageError("--mass, --eta and --kT are required unless --preset is given");

  r.params = PhysicalParams{mass, eta, kT, o.bond_length};
  try {
    r.params.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  if (o.potential == "harmonic") {
    if (!have_ks) throw UsageError("--ks is required for the harmonic potential");
    r.potential = Harmonic{ks, o.bond_length};
  } else if (o.potential == "morse") {
    if (!o.morse_depth || !o.morse_beta)
      throw UsageError("--morse-depth and --morse-beta are required for the morse potential");
    r.potential = Morse{*o.morse_depth, *o.morse_beta, o.bond_length};
  } else if (o.potential == "cubic") {
    if (!have_ks || !o.kc) throw UsageError("--ks and --kc are required for the cubic potential");
    r.potential = Cubic{ks, *o.kc, o.bond_length};
  } else {
    throw UsageError("unknown potential '" + o.potential + "'");
  }
  try {
    validate(r.potential);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  r.spring_constant = ks;

  if (o.noise == "variance-dt")
    r.noise_mode = NoiseMode::VarianceDt;
  else if (o.noise == "unit")
    r.noise_mode = NoiseMode::UnitVariance;
  else
    throw UsageError("unknown noise mode '" + o.noise + "'");

  r.init = State{o.x0.value_or(o.bond_length), o.v0};
  return r;
}

inline double require_dt(const Options& o, double fallback) {
  const double dt = o.dt.value_or(fallback);
  if (!(std::isfinite(dt) && dt > 0.0)) throw UsageError("--dt must be > 0");
  return dt;
}

inline const Harmonic& require_harmonic(const Resolved& r, const char* command) {
  const auto* h = std::get_if<Harmonic>(&r.potential);
  if (!h) throw UsageError(std::string(command) + " supports only the harmonic potential");
  return *h;
}

inline std::vector<double> dt_grid(const Options& o) {
  if (!(o.dt_min > 0.0) || !(o.dt_max > o.dt_min) || o.points < 2)
    throw UsageError("need 0 < --dt-min < --dt-max and --points >= 2");
  std::vector<double> grid(o.points);
  const double step = (o.dt_max - o.dt_min) / static_cast<double>(o.points - 1);
  for (std::size_t i = 0; i < o.points; ++i)
    grid[i] = o.dt_min + static_cast<double>(i) * step;
  grid.back() = o.dt_max;
  return grid;
}

// Written next to every --out file. Uses the --config format, so passing it
// back through --config reproduces the run.
inline void write_manifest(const std::string& path, const std::string& command, const Options& o,
                           const Resolved& r) {
  std::ofstream f(path);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  f << "# langevin run manifest\n"
    << "# command: " << command << '\n'
    << "# tool_version: " << kToolVersion << '\n'
    << "# generator_version: " << kGeneratorVersion << '\n'
    << "# timestamp: " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
  auto kv = [&f](const char* key, const std::string& value) {
    f << key << " = " << value << '\n';
  };
  auto num = [](double v) { return format_double(v); };
  kv("mass", num(r.params.mass));
  kv("eta", num(r.params.friction));
  kv("kT", num(r.params.thermal_energy));
  if (r.spring_constant > 0.0) kv("ks", num(r.spring_constant));
  kv("bond-length", num(r.params.bond_length));
  kv("potential", o.potential);
  if (o.morse_depth) kv("morse-depth", num(*o.morse_depth));
  if (o.morse_beta) kv("morse-beta", num(*o.morse_beta));
  if (o.kc) kv("kc", num(*o.kc));
  kv("x0", num(r.init.x));
  kv("v0", num(r.init.v));
  if (o.dt) kv("dt", num(*o.dt));
  if (o.steps) kv("steps", std::to_string(*o.steps));
  kv("seed", std::to_string(o.seed));
  kv("noise", o.noise);
  kv("ensemble", std::to_string(o.ensemble));
  if (o.burn_in) kv("burn-in", std::to_string(*o.burn_in));
  kv("stride", std::to_string(o.stride));
  kv("tolerance", num(o.tolerance));
  if (o.zero_noise) kv("zero-noise", "true");
  kv("dt-min", num(o.dt_min));
  kv("dt-max", num(o.dt_max));
  kv("points", std::to_string(o.points));
  if (o.grid) kv("grid", "true");
}

// Sends output to --out (plus manifest) or to the given stream.
class Sink {
 public:
  Sink(const Options& o, std::ostream& fallback) : path_(o.out) {
    if (!path_.empty()) {
      file_.open(path_);
      if (!file_) throw UsageError("cannot open output file '" + path_ + "'");
    }
    stream_ = path_.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *stream_; }
  void finish(const std::string& command, const Options& o, const Resolved& r) {
    if (path_.empty()) return;
    file_.close();
    write_manifest(path_ + ".manifest", command, o, r);
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

inline int cmd_simulate(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  SimulationConfig cfg;
  cfg.dt = require_dt(o, 1e-15);
  cfg.n_steps = o.steps.value_or(100);
  if (cfg.n_steps < 1) throw UsageError("--steps must be >= 1");
  cfg.seed = o.seed;
  cfg.noise_mode = r.noise_mode;
  const NoiseAmplitude noise = o.zero_noise ? NoiseAmplitude{0.0} : noise_amplitude(r.params);

  const Trajectory traj = simulate(r.init, r.params, r.potential, cfg, noise);
  Sink sink(o, out);
  auto& s = sink.stream();
  s << "step,time_s,x_nm,v_nm_per_s\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    s << k << ',' << format_double(traj.times[k]) << ',' << format_double(traj.states[k].x) << ','
      << format_double(traj.states[k].v) << '\n';
  }
  if (traj.diverged()) s << "# DIVERGED at step " << *traj.diverged_at << '\n';
  sink.finish("simulate", o, r);
  return traj.diverged() ? kDiverged : kOk;
}

inline int cmd_covariance_sweep(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const Harmonic& h = require_harmonic(r, "covariance-sweep");
  const auto grid = dt_grid(o);
  const NoiseAmplitude eps = noise_amplitude(r.params);

  Sink sink(o, out);
  auto& s = sink.stream();
  s << "# dt_critical_s=" << format_double(critical_dt(r.params, h.spring_constant)) << '\n';
  s << "dt_s,var_x,cov_xv,var_v,method,stable\n";
  auto row = [&s](double dt, const std::optional<CovarianceTriple>& t, const char* method,
                  bool stable) {
    s << format_double(dt) << ',';
    if (t)
      s << format_double(t->var_x) << ',' << format_double(t->cov_xv) << ','
        << format_double(t->var_v);
    else
      s << ",,";
    s << ',' << method << ',' << (stable ? "true" : "false") << '\n';
  };
  for (double dt : grid) {
    const bool stable = analyze_stability(r.params, h.spring_constant, dt).is_stable;
    std::optional<CovarianceTriple> closed, solved;
    try {
      closed = closed_form_covariance(r.params, h.spring_constant, dt);
    } catch (const PoleError&) {
    }
    try {
      solved = solve_stationary(build_update(r.params, h.spring_constant, dt), eps, dt);
    } catch (const SingularSystemError&) {
    }
    row(dt, closed, "closed-form", stable && closed.has_value());
    row(dt, solved, "linear-solve", stable && solved.has_value());
  }
  sink.finish("covariance-sweep", o, r);
  return kOk;
}

inline int cmd_stability(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const Harmonic& h = require_harmonic(r, "stability");
  Sink sink(o, out);
  auto& s = sink.stream();
  if (o.grid) {
    s << "dt_s,det_c,trace_c,spectral_radius,jury_one_minus_det,jury_p_plus_one,"
         "jury_p_minus_one,paper_condition,stable\n";
    for (double dt : dt_grid(o)) {
      const auto rep = analyze_stability(r.params, h.spring_constant, dt);
      s << format_double(dt) << ',' << format_double(rep.determinant) << ','
        << format_double(rep.trace) << ',' << format_double(rep.spectral_radius) << ','
        << format_double(rep.jury.one_minus_det) << ',' << format_double(rep.jury.at_plus_one)
        << ',' << format_double(rep.jury.at_minus_one) << ','
        << (rep.paper_condition_holds ? "true" : "false") << ','
        << (rep.is_stable ? "true" : "false") << '\n';
    }
  } else {
    const double dt = require_dt(o, 1e-15);
    const auto rep = analyze_stability(r.params, h.spring_constant, dt);
    s << "dt_s: " << format_double(dt) << '\n'
      << "dt_critical_s: " << format_double(rep.dt_critical) << '\n'
      << "condition k_s*dt^2 < eta*dt: " << (rep.paper_condition_holds ? "holds" : "violated")
      << '\n'
      << "det_C: " << format_double(rep.determinant) << '\n'
      << "trace_C: " << format_double(rep.trace) << '\n'
      << "eigenvalues: " << (rep.complex_eigenvalues ? "complex pair" : "real") << '\n'
      << "spectral_radius: " << format_double(rep.spectral_radius) << '\n'
      << "jury_margins: 1-det=" << format_double(rep.jury.one_minus_det)
      << " P(+1)=" << format_double(rep.jury.at_plus_one)
      << " P(-1)=" << format_double(rep.jury.at_minus_one) << '\n'
      << "verdict: " << (rep.is_stable ? "STABLE" : "UNSTABLE") << '\n';
  }
  sink.finish("stability", o, r);
  return kOk;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o);
  const Harmonic& h = require_harmonic(r, "verify");
  const double dt = require_dt(o, 5e-16);
  Sink sink(o, out);
  auto& s = sink.stream();

  if (!analyze_stability(r.params, h.spring_constant, dt).is_stable) {
    s << "refusing: dt=" << format_double(dt) << " s is unstable (dt_critical="
      << format_double(critical_dt(r.params, h.spring_constant)) << " s)\n";
    sink.finish("verify", o, r);
    return kUnstable;
  }
  if (!(o.tolerance > 0.0)) throw UsageError("--tolerance must be > 0");
  if (!(r.params.friction > 0.0)) throw UsageError("verify needs --eta > 0");

  EnsembleConfig ec;
  ec.n_trajectories = o.ensemble;
  ec.burn_in_steps = o.burn_in.value_or(default_burn_in(r.params, dt));
  ec.sample_stride = o.stride;
  ec.base_seed = o.seed;
  ec.sim.dt = dt;
  ec.sim.n_steps = o.steps.value_or(200);
  ec.sim.noise_mode = r.noise_mode;
  ec.threads = o.threads;
  if (ec.n_trajectories < 2) throw UsageError("--ensemble must be >= 2");
  if (ec.sample_stride < 1) throw UsageError("--stride must be >= 1");

  const NoiseAmplitude noise = o.zero_noise ? NoiseAmplitude{0.0} : noise_amplitude(r.params);
  const CovarianceTriple analytic = closed_form_covariance(r.params, h.spring_constant, dt);
  const EnsembleEstimate est = run_ensemble(r.init, r.params, h, ec, noise);

  auto rel = [](double emp, double ana) { return std::abs(emp - ana) / std::abs(ana); };
  const double ex = rel(est.triple.var_x, analytic.var_x);
  const double ec_ = rel(est.triple.cov_xv, analytic.cov_xv);
  const double ev = rel(est.triple.var_v, analytic.var_v);
  const bool pass = !est.diverged() && ex <= o.tolerance && ec_ <= o.tolerance &&
                    ev <= o.tolerance;

  s << "dt_s: " << format_double(dt) << '\n'
    << "trajectories: " << est.n_trajectories_used << " (diverged " << est.n_diverged << ")\n"
    << "burn_in_steps: " << ec.burn_in_steps << '\n'
    << "samples: " << est.n_samples << '\n'
    << "mean_x: " << format_double(est.mean_x) << '\n'
    << "mean_v: " << format_double(est.mean_v) << '\n'
    << "quantity,empirical,stderr,analytic,relative_error\n"
    << "var_x," << format_double(est.triple.var_x) << ',' << format_double(est.stderr_var_x)
    << ',' << format_double(analytic.var_x) << ',' << format_double(ex) << '\n'
    << "cov_xv," << format_double(est.triple.cov_xv) << ',' << format_double(est.stderr_cov)
    << ',' << format_double(analytic.cov_xv) << ',' << format_double(ec_) << '\n'
    << "var_v," << format_double(est.triple.var_v) << ',' << format_double(est.stderr_var_v)
    << ',' << format_double(analytic.var_v) << ',' << format_double(ev) << '\n';
  if (o.zero_noise)
    s << "note: noise forced to zero, so the ensemble cannot reproduce the analytic "
         "covariance\n";
  if (r.noise_mode == NoiseMode::UnitVariance)
    s << "note: unit-variance noise does not match the analytic covariance, which assumes "
         "variance-dt increments\n";
  s << "tolerance: " << format_double(o.tolerance) << '\n'
    << "result: " << (pass ? "PASS" : "FAIL") << '\n';
  sink.finish("verify", o, r);
  return pass ? kOk : kVerifyFailed;
}

inline void add_options(CLI::App& app, Options& o) {
  app.add_option("--preset", o.preset, "Parameter preset (n2-water)");
  app.add_option("--mass", o.mass, "Mass, pN s^2/nm");
  app.add_option("--eta", o.eta, "Friction coefficient, pN s/nm");
  app.add_option("--kT", o.kT, "Thermal energy, pN nm");
  app.add_option("--ks", o.ks, "Spring constant, pN/nm");
  app.add_option("--bond-length", o.bond_length, "Bond length b, nm")->capture_default_str();
  app.add_option("--potential", o.potential, "harmonic | morse | cubic")
      ->check(CLI::IsMember({"harmonic", "morse", "cubic"}))
      ->capture_default_str();
  app.add_option("--morse-depth", o.morse_depth, "Morse well depth D (pN nm)");
  app.add_option("--morse-beta", o.morse_beta, "Morse steepness beta, 1/nm");
  app.add_option("--kc", o.kc, "Cubic force constant, 1/nm");
  app.add_option("--x0", o.x0, "Initial position, nm (default: bond length)");
  app.add_option("--v0", o.v0, "Initial velocity, nm/s")->capture_default_str();
  app.add_option("--dt", o.dt, "Time step, s");
  app.add_option("--steps", o.steps, "Number of steps (verify: sampled steps after burn-in)");
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--noise", o.noise, "variance-dt | unit")
      ->check(CLI::IsMember({"variance-dt", "unit"}))
      ->capture_default_str();
  app.add_option("--ensemble", o.ensemble, "Number of trajectories")->capture_default_str();
  app.add_option("--burn-in", o.burn_in, "Burn-in steps (default: 20 m/eta)");
  app.add_option("--stride", o.stride, "Steps between ensemble samples")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--tolerance", o.tolerance, "Relative tolerance for verify")
      ->capture_default_str();
  app.add_flag("--zero-noise", o.zero_noise, "Switch the random force off");
  app.add_option("--dt-min", o.dt_min, "Smallest dt of the grid")->capture_default_str();
  app.add_option("--dt-max", o.dt_max, "Largest dt of the grid")->capture_default_str();
  app.add_option("--points", o.points, "Grid points")->capture_default_str();
  app.add_flag("--grid", o.grid, "stability: emit a CSV over the dt grid");
  app.add_option("--out", o.out, "Write output to FILE (and FILE.manifest)");
  app.set_config("--config", "", "Read flags from a key = value file");
  app.allow_config_extras(CLI::config_extras_mode::error);
}

/// Runs the tool with argv-style arguments (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Langevin dynamics of a diatomic bond in implicit solvent", "langevin"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  Options o;
  add_options(app, o);
  auto* simulate = app.add_subcommand("simulate", "Simulate one trajectory as CSV")->fallthrough();
  auto* sweep = app.add_subcommand("covariance-sweep", "Stationary covariance over a dt grid")
                    ->fallthrough();
  auto* stability =
      app.add_subcommand("stability", "Stability of the Euler map")->fallthrough();
  auto* verify =
      app.add_subcommand("verify", "Ensemble covariance against the closed form")->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (sweep->parsed()) return cmd_covariance_sweep(o, out);
    if (stability->parsed()) return cmd_stability(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnstableStepError& e) {
    err << "error: " << e.what() << '\n';
    return kUnstable;
  }
  return kUsage;
}

}  // namespace langevin::cli
