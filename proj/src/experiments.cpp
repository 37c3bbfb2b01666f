#include "dampkdv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <set>

#include "dampkdv/estimates.hpp"
#include "dampkdv/kernels.hpp"
#include "dampkdv/normal_form.hpp"

namespace dampkdv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Runs f(0..n-1) across threads; the first exception (by index) is rethrown afterwards.
template <class F>
void for_each_parallel(int n, F&& f) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

RunReport base_report(const RunConfig& cfg) {
  RunReport r;
  r.experiment = cfg.experiment;
  r.config_hash = cfg.hash();
  r.config = cfg.to_json();
  return r;
}

std::string s_label(double s) { return "s" + format_index(s); }

CoefSeq trig_mode(GridSpec grid, const std::string& profile, int mode, double amplitude) {
  CoefSeq u(grid);
  if (mode > grid.K) throw ConfigError("profile mode " + std::to_string(mode) + " exceeds K");
  // cos(mx) -> a/2 on +-m;  sin(mx) -> -ia/2 on +m
  u.set_mode(mode, profile == "cos" ? cplx{amplitude / 2.0, 0.0} : cplx{0.0, -amplitude / 2.0});
  return u;
}

void write_csv(RunReport& r, const std::filesystem::path& out, const std::string& name, const TrajectoryRecord& traj,
               const CsvColumns& cols) {
  if (out.empty()) return;
  write_trajectory_csv(traj, cols, out / name);
  r.artifacts.push_back(name);
}

void envelope_checks(RunReport& r, const NormSeries& series, double u0_l2, double f_l2, double gamma,
                     const Tolerances& tol) {
  const double ball = f_l2 / gamma;
  const double viol = envelope_violation(series.times, series.norms, u0_l2, f_l2, gamma);
  double sup = 0.0;
  for (double n : series.norms) sup = std::max(sup, n);
  r.measure("u0_l2", u0_l2);
  r.measure("f_l2", f_l2);
  r.measure("ball_radius", ball);
  r.measure("sup_l2", sup);
  r.measure("final_l2", series.norms.back());
  r.check("envelope.max_violation", viol, "<=", tol.envelope, "||u(t)|| - envelope(t) over every step");
  if (u0_l2 <= ball * (1.0 + 1e-12)) {
    r.check("ball.max_excess", sup - ball, "<=", tol.envelope, "u0 inside ||f||/gamma: the ball is invariant");
  } else {
    r.diagnostics.push_back("ball invariance not applicable: ||u0|| > ||f||/gamma");
  }
}

void absorption_checks(RunReport& r, const NormSeries& series, double u0_l2, double f_l2, double gamma, double h,
                       double T) {
  const double predicted = absorption_prediction(u0_l2, f_l2, gamma);
  const Absorption abs = measure_absorption(series.times, series.norms, f_l2, gamma);
  r.measure("absorption.predicted", predicted);
  r.measure("absorption.radius", 2.0 * f_l2 / gamma);
  if (!abs.reached) {
    r.check("absorption.time", kInf, "<=", predicted + h, "not reached");
    r.diagnostics.push_back("horizon: T = " + format_double(T) + " ends before ||u|| enters the ball of radius " +
                            format_double(2.0 * f_l2 / gamma) + " (predicted entry " + format_double(predicted) +
                            ")");
    return;
  }
  r.measure("absorption.measured", abs.time);
  r.check("absorption.time", abs.time, "<=", predicted + h, "first t with ||u|| < 2||f||/gamma thereafter");
}

}  // namespace

CoefSeq make_forcing(const RunConfig& cfg, GridSpec grid) {
  const auto& p = cfg.forcing_profile;
  if (p == "zero") return CoefSeq(grid);
  if (p == "cos" || p == "sin") return trig_mode(grid, p, cfg.forcing_mode, cfg.forcing_amplitude);
  if (p == "random") return random_rough_state(grid, cfg.forcing_sigma, mix(cfg.seed ^ 0x666f7263ULL), cfg.forcing_amplitude);
  throw ConfigError("unknown forcing.profile '" + p + "'");
}

CoefSeq make_initial(const RunConfig& cfg, GridSpec grid, std::uint64_t seed, double l2) {
  const auto& p = cfg.init_profile;
  if (p == "zero") return CoefSeq(grid);
  if (p == "cos" || p == "sin") return trig_mode(grid, p, cfg.init_mode, cfg.init_amplitude);
  if (p == "random") return random_rough_state(grid, cfg.init_sigma, seed, l2);
  if (p == "ball") {
    const double radius = l2_norm(make_forcing(cfg, grid)) / cfg.gamma;
    return random_rough_state(grid, cfg.init_sigma, seed, radius);
  }
  throw ConfigError("unknown init.profile '" + p + "'");
}

CoefSeq make_initial(const RunConfig& cfg, GridSpec grid) { return make_initial(cfg, grid, cfg.seed, cfg.init_l2); }

FlowParams make_flow(const RunConfig& cfg, GridSpec grid) {
  if (cfg.gamma <= 0.0) throw ConfigError("gamma must be > 0 for a damped flow");
  FlowParams p = FlowParams::damped(cfg.gamma, make_forcing(cfg, grid), cfg.step());
  p.scheme = cfg.time_scheme();
  return p;
}

double absorption_prediction(double u0_l2, double f_l2, double gamma) {
  if (!(f_l2 > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("absorption_prediction: need ||f|| > 0, gamma > 0");
  const double b = f_l2 / gamma;
  if (u0_l2 <= 2.0 * b) return 0.0;
  // e^{-gt}(a - b) = b
  return std::log((u0_l2 - b) / b) / gamma;
}

Absorption measure_absorption(const std::vector<double>& times, const std::vector<double>& norms, double f_l2,
                              double gamma) {
  if (times.size() != norms.size() || times.empty())
    throw std::invalid_argument("measure_absorption: need matching, non-empty series");
  const double radius = 2.0 * f_l2 / gamma;
  Absorption a;
  std::size_t i = norms.size();
  while (i > 0 && norms[i - 1] < radius) --i;
  a.reached = i < norms.size();
  a.time = a.reached ? times[i] : kInf;
  return a;
}

double envelope_violation(const std::vector<double>& times, const std::vector<double>& norms, double u0_l2,
                          double f_l2, double gamma) {
  double worst = -kInf;
  for (std::size_t i = 0; i < times.size(); ++i)
    worst = std::max(worst, norms[i] - energy_envelope(times[i], u0_l2, f_l2, gamma));
  return worst;
}

NormSeries run_with_norms(const CoefSeq& u0, double T, const FlowParams& params, int sample_every) {
  if (sample_every < 1) throw std::invalid_argument("run_with_norms: sample_every must be >= 1");
  NormSeries s;
  const auto full = static_cast<std::size_t>(std::floor(T / params.h + 1e-9));
  const bool partial = T - static_cast<double>(full) * params.h > 1e-9 * params.h;
  const std::size_t last = full + (partial ? 1 : 0);
  s.times.reserve(last + 1);
  s.norms.reserve(last + 1);
  integrate(u0, T, params, [&](std::size_t n, double t, const CoefSeq& u) {
    const double norm = l2_norm(u);
    s.times.push_back(t);
    s.norms.push_back(norm);
    if (n % static_cast<std::size_t>(sample_every) == 0 || n == last) {
      s.samples.times.push_back(t);
      s.samples.states.push_back(u);
      s.samples.l2_norms.push_back(norm);
    }
  });
  return s;
}

RunReport exp_simulate(const RunConfig& cfg, const std::filesystem::path& out) {
  validate(cfg);
  RunReport r = base_report(cfg);
  const GridSpec grid = cfg.grid();
  const FlowParams params = make_flow(cfg, grid);
  const CoefSeq u0 = make_initial(cfg, grid);
  const NormSeries series = run_with_norms(u0, cfg.T, params, cfg.sample_every);
  const double f_l2 = l2_norm(params.forcing);
  envelope_checks(r, series, l2_norm(u0), f_l2, cfg.gamma, cfg.tol);
  for (double s : cfg.s) r.measure("final_hs." + s_label(s), sobolev_norm(series.samples.states.back(), SobolevIndex{s}));
  r.measure("steps", static_cast<double>(series.times.size() - 1));
  write_csv(r, out, "trajectory.csv", series.samples, {u0, cfg.gamma, f_l2, cfg.s});
  return r;
}

RunReport exp_energy_envelope(const RunConfig& cfg, const std::filesystem::path& out) {
  validate(cfg);
  RunReport r = base_report(cfg);
  const GridSpec grid = cfg.grid();
  const FlowParams params = make_flow(cfg, grid);
  const CoefSeq u0 = make_initial(cfg, grid);
  const NormSeries series = run_with_norms(u0, cfg.T, params, cfg.sample_every);
  const double f_l2 = l2_norm(params.forcing);
  envelope_checks(r, series, l2_norm(u0), f_l2, cfg.gamma, cfg.tol);
  write_csv(r, out, "trajectory.csv", series.samples, {u0, cfg.gamma, f_l2, cfg.s});
  return r;
}

RunReport exp_absorbing_ball(const RunConfig& cfg, const std::filesystem::path& out) {
  validate(cfg);
  RunReport r = base_report(cfg);
  const GridSpec grid = cfg.grid();
  const FlowParams params = make_flow(cfg, grid);
  const double f_l2 = l2_norm(params.forcing);
  if (!(f_l2 > 0.0)) throw ConfigError("absorbing ball: forcing must be nonzero");
  const CoefSeq u0 = make_initial(cfg, grid);
  const NormSeries series = run_with_norms(u0, cfg.T, params, cfg.sample_every);
  absorption_checks(r, series, l2_norm(u0), f_l2, cfg.gamma, params.h, cfg.T);
  write_csv(r, out, "trajectory.csv", series.samples, {u0, cfg.gamma, f_l2, cfg.s});
  return r;
}

RunReport exp_envelope_suite(const RunConfig& cfg, const std::filesystem::path& out) {
  validate(cfg);
  RunReport r = base_report(cfg);
  const GridSpec grid = cfg.grid();
  const FlowParams params = make_flow(cfg, grid);
  const CoefSeq u0 = make_initial(cfg, grid);
  const NormSeries series = run_with_norms(u0, cfg.T, params, cfg.sample_every);
  const double f_l2 = l2_norm(params.forcing);
  envelope_checks(r, series, l2_norm(u0), f_l2, cfg.gamma, cfg.tol);
  if (f_l2 > 0.0)
    absorption_checks(r, series, l2_norm(u0), f_l2, cfg.gamma, params.h, cfg.T);
  else
    r.diagnostics.push_back("absorbing ball not applicable: f = 0");
  write_csv(r, out, "trajectory.csv", series.samples, {u0, cfg.gamma, f_l2, cfg.s});
  return r;
}

RunReport exp_smoothing(const RunConfig& cfg, const std::filesystem::path& out) {
  validate(cfg);
  if (cfg.ladder.size() < 3) throw ConfigError("smoothing: ladder too short (need >= 3 rungs)");
  if (cfg.restart >= cfg.T) throw ConfigError("smoothing: restart must be < T");
  RunReport r = base_report(cfg);
  const int rungs = static_cast<int>(cfg.ladder.size());
  const std::size_t ns = cfg.s.size();

  // One initial datum on the finest grid; coarser rungs see its truncation.
  const CoefSeq u0_fine = make_initial(cfg, GridSpec::with_modes(cfg.ladder.back()));

  struct Rung {
    std::vector<double> gap, restart_gap, u0_norm;
    std::string csv;
  };
  std::vector<Rung> res(static_cast<std::size_t>(rungs));
  for_each_parallel(rungs, [&](int i) {
    const GridSpec grid = GridSpec::with_modes(cfg.ladder[static_cast<std::size_t>(i)]);
    const FlowParams params = make_flow(cfg, grid);
    const CoefSeq u0 = resample(u0_fine, grid);
    const TrajectoryRecord traj = evolve(u0, cfg.T, params, cfg.sample_every);
    std::size_t i0;
    try {
      i0 = traj.index_at(cfg.restart);
    } catch (const std::out_of_range&) {
      throw ConfigError("smoothing: restart = " + format_double(cfg.restart) + " is not a sample time");
    }
    Rung& rung = res[static_cast<std::size_t>(i)];
    rung.gap.assign(ns, 0.0);
    rung.restart_gap.assign(ns, 0.0);
    for (std::size_t j = 0; j < ns; ++j) {
      const SobolevIndex s{cfg.s[j]};
      rung.u0_norm.push_back(sobolev_norm(u0, s));
      for (std::size_t n = 0; n < traj.size(); ++n) {
        rung.gap[j] = std::max(rung.gap[j], duhamel_gap(u0, traj.states[n], traj.times[n], cfg.gamma, s));
        if (n >= i0)
          rung.restart_gap[j] = std::max(
              rung.restart_gap[j],
              duhamel_gap(traj.states[i0], traj.states[n], traj.times[n] - traj.times[i0], cfg.gamma, s));
      }
    }
    if (!out.empty()) {
      rung.csv = "smoothing_K" + std::to_string(grid.K) + ".csv";
      write_trajectory_csv(traj, {u0, cfg.gamma, l2_norm(params.forcing), cfg.s}, out / rung.csv);
    }
  });
  for (const auto& rung : res)
    if (!rung.csv.empty()) r.artifacts.push_back(rung.csv);

  for (std::size_t j = 0; j < ns; ++j) {
    const double s = cfg.s[j];
    const std::string tag = s_label(s);
    for (int i = 0; i < rungs; ++i) {
      const std::string k = ".K" + std::to_string(cfg.ladder[static_cast<std::size_t>(i)]);
      r.measure(tag + ".gap" + k, res[static_cast<std::size_t>(i)].gap[j]);
      r.measure(tag + ".restart_gap" + k, res[static_cast<std::size_t>(i)].restart_gap[j]);
      r.measure(tag + ".u0_norm" + k, res[static_cast<std::size_t>(i)].u0_norm[j]);
    }
    const Rung& top = res.back();
    const Rung& below = res[res.size() - 2];
    r.check(tag + ".gap_ratio", top.gap[j] / below.gap[j], "<=", cfg.tol.ladder_ratio,
            "sup_t ||u(t) - e^{-gt}e^{tL}u0||_{H^s}, top rung over the one below");
    r.check(tag + ".restart_gap_ratio", top.restart_gap[j] / below.restart_gap[j], "<=", cfg.tol.ladder_ratio,
            "same with restart at t = " + format_double(cfg.restart));
    const bool rough = cfg.init_profile == "random" && cfg.init_sigma > 0.5 && cfg.init_sigma < 0.5 + s;
    if (rough) {
      double growth = kInf;
      for (int i = 1; i < rungs; ++i)
        growth = std::min(growth, res[static_cast<std::size_t>(i)].u0_norm[j] / res[static_cast<std::size_t>(i - 1)].u0_norm[j]);
      r.check(tag + ".u0_norm_growth", growth, ">=", cfg.tol.norm_growth, "smallest per-rung growth of ||u0||_{H^s}");
    } else {
      r.diagnostics.push_back(tag + ": initial data not in the rough window (1/2, 1/2 + s); growth contrast skipped");
    }
  }
  return r;
}

RunReport exp_kdv_limit(const RunConfig& cfg, const std::filesystem::path& out) {
  validate(cfg);
  if (cfg.gamma != 0.0) throw ConfigError("kdv-limit: gamma must be 0");
  if (cfg.forcing_profile != "zero" && cfg.forcing_amplitude != 0.0) throw ConfigError("kdv-limit: forcing must be zero");
  RunReport r = base_report(cfg);
  const GridSpec grid = cfg.grid();
  FlowParams params = FlowParams::undamped(CoefSeq(grid), cfg.step());
  params.scheme = cfg.time_scheme();
  const CoefSeq u0 = make_initial(cfg, grid);
  const TrajectoryRecord traj = evolve(u0, cfg.T, params, cfg.sample_every);
  const double u0_l2 = l2_norm(u0);
  double drift = 0.0;
  for (double n : traj.l2_norms) drift = std::max(drift, std::abs(n - u0_l2));
  r.measure("u0_l2", u0_l2);
  r.measure("final_l2", traj.l2_norms.back());
  r.measure("max_sample_drift", drift);
  r.check("conservation.error", std::abs(traj.l2_norms.back() - u0_l2), "<=", cfg.tol.conservation,
          "| ||u(T)|| - ||u0|| |");
  write_csv(r, out, "trajectory.csv", traj, {u0, 0.0, 0.0, cfg.s});
  return r;
}

RunReport exp_attractor_probe(const RunConfig& cfg, const std::filesystem::path& out) {
  validate(cfg);
  const auto& l2s = cfg.ensemble_l2;
  if (l2s.size() < 4) throw ConfigError("attractor: ensemble needs >= 4 members (ensemble.l2)");
  if (std::set<double>(l2s.begin(), l2s.end()).size() != l2s.size())
    throw ConfigError("attractor: ensemble.l2 values must be distinct");
  RunReport r = base_report(cfg);
  const GridSpec grid = cfg.grid();
  const FlowParams params = make_flow(cfg, grid);
  const double f_l2 = l2_norm(params.forcing);
  const bool forced = f_l2 > 0.0;
  const int m = static_cast<int>(l2s.size());
  const std::size_t ns = cfg.s.size();

  r.check("horizon.gamma_T", cfg.gamma * cfg.T, ">=", 10.0, "T must be long against 1/gamma");
  if (cfg.gamma * cfg.T < 10.0) r.diagnostics.push_back("horizon: gamma*T < 10, late-time window not meaningful");

  struct Member {
    double t_star = 0.0;
    bool reached = true;
    std::vector<double> radius;
  };
  std::vector<Member> res(static_cast<std::size_t>(m));
  for_each_parallel(m, [&](int i) {
    const CoefSeq u0 =
        make_initial(cfg, grid, cfg.seed + static_cast<std::uint64_t>(i), l2s[static_cast<std::size_t>(i)]);
    const NormSeries series = run_with_norms(u0, cfg.T, params, cfg.sample_every);
    Member& mem = res[static_cast<std::size_t>(i)];
    if (forced) {
      const Absorption a = measure_absorption(series.times, series.norms, f_l2, cfg.gamma);
      mem.reached = a.reached;
      mem.t_star = a.reached ? a.time : cfg.T;
    }
    const double start = mem.t_star + 0.75 * (cfg.T - mem.t_star);
    mem.radius.assign(ns, 0.0);
    const auto& smp = series.samples;
    for (std::size_t n = 0; n < smp.size(); ++n) {
      if (smp.times[n] < start) continue;
      for (std::size_t j = 0; j < ns; ++j)
        mem.radius[j] = std::max(mem.radius[j], sobolev_norm(smp.states[n], SobolevIndex{cfg.s[j]}));
    }
    if (!out.empty())
      write_trajectory_csv(smp, {u0, cfg.gamma, f_l2, cfg.s}, out / ("attractor_m" + std::to_string(i) + ".csv"));
  });
  if (!out.empty())
    for (int i = 0; i < m; ++i) r.artifacts.push_back("attractor_m" + std::to_string(i) + ".csv");

  int unreached = 0;
  for (int i = 0; i < m; ++i) {
    const Member& mem = res[static_cast<std::size_t>(i)];
    r.measure("t_star.m" + std::to_string(i), mem.reached ? mem.t_star : kInf);
    unreached += !mem.reached;
  }
  if (forced) {
    r.check("absorbed_members", m - unreached, ">=", m, "every member enters the ball 2||f||/gamma");
    if (unreached) r.diagnostics.push_back("horizon: " + std::to_string(unreached) + " member(s) never absorbed");
  }
  for (std::size_t j = 0; j < ns; ++j) {
    const std::string tag = s_label(cfg.s[j]);
    double lo = kInf, hi = 0.0;
    for (int i = 0; i < m; ++i) {
      const double rad = res[static_cast<std::size_t>(i)].radius[j];
      r.measure(tag + ".radius.m" + std::to_string(i), rad);
      lo = std::min(lo, rad);
      hi = std::max(hi, rad);
    }
    r.measure(tag + ".radius.min", lo);
    r.measure(tag + ".radius.max", hi);
    if (forced)
      r.check(tag + ".radius_spread", hi / lo - 1.0, "<=", cfg.tol.radius_spread,
              "late-time sup ||u||_{H^s}: (max - min) / min over the ensemble");
    else
      r.check(tag + ".radius_max", hi, "<=", cfg.tol.decay_radius, "f = 0: late-time radius decays to zero");
  }
  return r;
}

std::vector<NfCase> default_nf_cases(const RunConfig& cfg) {
  NfCase a;
  a.K = cfg.nf_K;
  a.gamma = 1.0;
  a.seed = cfg.seed + 2;
  a.t = cfg.nf_t;
  a.dt = cfg.nf_dt;

  NfCase b = a;
  b.K = std::max(4, cfg.nf_K / 2);
  b.gamma = 0.5;
  b.forcing_profile = "sin";
  b.forcing_mode = 2;
  b.forcing_amplitude = 0.5;
  b.init_sigma = 1.2;
  b.init_l2 = 1.0;
  b.seed = cfg.seed + 3;

  NfCase c = a;
  c.gamma = 2.0;
  c.forcing_profile = "random";
  c.forcing_amplitude = 1.0;
  c.init_sigma = 2.0;
  c.init_l2 = 0.5;
  c.seed = cfg.seed + 4;
  return {a, b, c};
}

NfStudy nf_study(const NfCase& c) {
  RunConfig fc;
  fc.K = c.K;
  fc.seed = c.seed;
  fc.forcing_profile = c.forcing_profile;
  fc.forcing_mode = c.forcing_mode;
  fc.forcing_amplitude = c.forcing_amplitude;
  const GridSpec grid = GridSpec::with_modes(c.K);
  const double h = c.dt / 4.0;
  const FlowParams params = FlowParams::damped(c.gamma, make_forcing(fc, grid), h);
  const CoefSeq u0 = random_rough_state(grid, c.init_sigma, c.seed, c.init_l2);

  // Only the window [t - 2dt, t + 2dt] is kept.
  TrajectoryRecord rec;
  const double from = c.t - 2.0 * c.dt - 0.5 * h;
  integrate(u0, c.t + 2.0 * c.dt, params, [&](std::size_t, double t, const CoefSeq& u) {
    if (t < from) return;
    rec.times.push_back(t);
    rec.states.push_back(u);
    rec.l2_norms.push_back(l2_norm(u));
  });
  const NormalFormFrame frame = NormalFormFrame::for_flow(params);
  NfStudy s;
  s.residual = nf_residual(rec, frame, c.t, c.dt);
  s.residual_coarse = nf_residual(rec, frame, c.t, 2.0 * c.dt);
  s.ratio = s.residual_coarse / s.residual;
  s.lattice_residual = nf_residual(rec, frame, c.t, c.dt, Closure::lattice);
  s.one_third_coefficient_residual = nf_residual(rec, frame, c.t, c.dt, Closure::galerkin, -1.0 / 3.0);
  s.integrated_residual =
      integrated_identity_residual(rec, frame, rec.index_at(c.t - 2.0 * c.dt), rec.index_at(c.t + 2.0 * c.dt));
  return s;
}

RunReport exp_verify_identities(const RunConfig& cfg, const std::filesystem::path&) {
  validate(cfg);
  RunReport r = base_report(cfg);

  const auto cubic = kernels::parallel::cubic_identity_scan(cfg.identity_bound);
  const auto quartic = kernels::parallel::quartic_identity_scan(cfg.identity_bound);
  r.measure("cubic.exhaustive.checked", static_cast<double>(cubic.checked));
  r.measure("quartic.exhaustive.checked", static_cast<double>(quartic.checked));
  r.check("cubic.exhaustive.violations", static_cast<double>(cubic.violations), "<=", 0.0,
          "(k1+k2)^3 - k1^3 - k2^3 = 3(k1+k2)k1k2, |k| <= " + std::to_string(cfg.identity_bound));
  r.check("quartic.exhaustive.violations", static_cast<double>(quartic.violations), "<=", 0.0,
          "-(k1^3+k2^3+k3^3+k4^3) = 3(k1+k2)(k1+k3)(k2+k3), |k| <= " + std::to_string(cfg.identity_bound));

  {
    std::mt19937_64 gen(mix(cfg.seed ^ 0x70686173ULL));
    const auto span = static_cast<std::uint64_t>(2 * cfg.sampled_bound + 1);
    auto draw = [&] { return static_cast<std::int64_t>(gen() % span) - cfg.sampled_bound; };
    std::int64_t bad_cubic = 0, bad_quartic = 0;
    for (int i = 0; i < cfg.sampled_count; ++i) {
      const auto k1 = draw(), k2 = draw(), k3 = draw();
      try {
        cubic_phase(k1, k2);
      } catch (const std::exception&) {
        ++bad_cubic;
      }
      try {
        quartic_phase(k1, k2, k3);
      } catch (const std::exception&) {
        ++bad_quartic;
      }
    }
    r.measure("sampled.count", cfg.sampled_count);
    r.measure("sampled.bound", static_cast<double>(cfg.sampled_bound));
    r.check("cubic.sampled.violations", static_cast<double>(bad_cubic), "<=", 0.0, "128-bit arithmetic");
    r.check("quartic.sampled.violations", static_cast<double>(bad_quartic), "<=", 0.0, "128-bit arithmetic");
  }

  {
    const GridSpec grid = GridSpec::with_modes(cfg.resonant_K);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 8; ++i)
      worst = std::max(worst, resonant_sum_identity_check(random_rough_state(grid, 1.0, mix(cfg.seed + i), 1.0)));
    r.check("resonant.residual", worst, "<=", cfg.tol.resonant,
            "S2 and S3 cancel; resonant sum = -|u_k|^2 u_k / k at K = " + std::to_string(cfg.resonant_K));
  }

  {
    constexpr int B = 64;
    std::int64_t bad = 0;
#pragma omp parallel for reduction(+ : bad) schedule(static)
    for (int k1 = -B; k1 <= B; ++k1) {
      if (k1 == 0) continue;
      for (int k2 = -B; k2 <= B; ++k2) {
        if (k2 == 0) continue;
        for (int k3 = -B; k3 <= B; ++k3) {
          if (k3 == 0) continue;
          const Resonance c = resonance_classify(k1, k2, k3);
          const bool a = k1 + k2 == 0, b = k1 + k3 == 0, d = k2 + k3 == 0;
          Resonance expect = Resonance::nonresonant;
          if (d) expect = Resonance::outside_domain;
          else if (a && b) expect = Resonance::s1;
          else if (a) expect = Resonance::s2;
          else if (b) expect = Resonance::s3;
          const bool nonres = (k1 + k2) * (k1 + k3) * (k2 + k3) != 0;
          bad += (c != expect) || (!d && (c == Resonance::nonresonant) != nonres);
        }
      }
    }
    r.check("resonance.partition_violations", static_cast<double>(bad), "<=", 0.0, "|k_i| <= 64");
  }

  {
    const GridSpec grid = GridSpec::with_modes(16);
    const CoefSeq u = random_rough_state(grid, 1.0, mix(cfg.seed ^ 0x42ULL), 1.0);
    const CoefSeq v = random_rough_state(grid, 0.5, mix(cfg.seed ^ 0x43ULL), 1.0);
    auto asym = [](const CoefSeq& w) {
      double worst = 0.0;
      for (int k = 0; k <= w.K(); ++k) worst = std::max(worst, std::abs(w[k] - std::conj(w[-k])));
      return worst;
    };
    r.check("hermitian.B", asym(op_B(u, v, 0.0)), "<=", 1e-12, "stationary B on real inputs");
    r.check("hermitian.R", asym(op_R(u, 0.0)), "<=", 1e-12, "stationary R on real inputs");
  }

  const auto cases = default_nf_cases(cfg);
  std::vector<NfStudy> studies(cases.size());
  for_each_parallel(static_cast<int>(cases.size()),
                    [&](int i) { studies[static_cast<std::size_t>(i)] = nf_study(cases[static_cast<std::size_t>(i)]); });
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const std::string tag = "nf.case" + std::to_string(i);
    const NfStudy& s = studies[i];
    r.measure(tag + ".K", cases[i].K);
    r.measure(tag + ".dt", cases[i].dt);
    r.measure(tag + ".residual_2dt", s.residual_coarse);
    r.measure(tag + ".lattice_closure_residual", s.lattice_residual);
    r.measure(tag + ".coefficient_one_third_residual", s.one_third_coefficient_residual);
    r.check(tag + ".residual", s.residual, "<=", cfg.tol.nf_residual, "central difference vs right-hand side");
    r.check(tag + ".halving_ratio_lo", s.ratio, ">=", cfg.tol.nf_ratio_lo, "residual(2dt) / residual(dt)");
    r.check(tag + ".halving_ratio_hi", s.ratio, "<=", cfg.tol.nf_ratio_hi, "residual(2dt) / residual(dt)");
    r.check(tag + ".integrated_residual", s.integrated_residual, "<=", cfg.tol.nf_residual,
            "Simpson over [t - 2dt, t + 2dt]");
  }
  return r;
}

RunReport exp_estimate_constants(const RunConfig& cfg, const std::filesystem::path&) {
  validate(cfg);
  if (cfg.lattice_K.size() < 2) throw ConfigError("estimate-constants: lattice.K needs >= 2 sizes");
  RunReport r = base_report(cfg);
  const auto& Ks = cfg.lattice_K;

  std::vector<double> kis;
  for (int K : Ks) {
    const auto e = kis_check(LatticeBudget::make(K, 0.5, 0.01));
    kis.push_back(e.value);
    r.measure("kis.K" + std::to_string(K), e.value);
  }
  r.check("kis.floor_ratio", kis.back() / kis.front(), ">=", cfg.tol.kis_floor, "min at largest K over min at smallest K");
  r.measure("kis.min", *std::min_element(kis.begin(), kis.end()));

  for (double s : cfg.lattice_s) {
    for (double eps : cfg.lattice_eps) {
      const std::string tag = "multiplier." + s_label(s) + ".eps" + format_index(eps);
      std::vector<double> sup, cons;
      for (int K : Ks) {
        const auto budget = LatticeBudget::make(K, s, eps);
        sup.push_back(multiplier_sup(budget).value);
        cons.push_back(multiplier_sup(budget, kernels::MultiplierForm::consequence).value);
        r.measure(tag + ".K" + std::to_string(K), sup.back());
        r.measure(tag + ".consequence.K" + std::to_string(K), cons.back());
      }
      double growth = 0.0;
      for (std::size_t i = 1; i < sup.size(); ++i) growth = std::max(growth, sup[i] / sup[i - 1]);
      r.check(tag + ".growth", growth, "<=", cfg.tol.lattice_growth, "largest sup ratio between consecutive K");
    }
  }

  for (double s : cfg.lattice_s) {
    const std::string tag = "bilinear." + s_label(s);
    std::vector<double> c;
    for (int K : Ks) {
      const auto est = bilinear_constant(LatticeBudget::make(K, s, cfg.lattice_eps.front()), cfg.trials, cfg.seed);
      c.push_back(est.sup_ratio);
      r.measure(tag + ".K" + std::to_string(K), est.sup_ratio);
      r.measure(tag + ".best_random.K" + std::to_string(K), est.best_random);
    }
    double growth = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) growth = std::max(growth, c[i] / c[i - 1]);
    r.check(tag + ".growth", growth, "<=", cfg.tol.bilinear_growth, "empirical C in ||B(u,v)||_{H^s} <= C||u|| ||v||");

    const auto rho = rho_bound_scan(LatticeBudget::make(Ks.back(), s, cfg.lattice_eps.front()), cfg.trials, cfg.seed);
    r.measure("rho." + s_label(s) + ".worst_ratio", rho.worst_ratio);
    r.check("rho." + s_label(s) + ".violations", static_cast<double>(rho.violations), "<=", 0.0,
            "||rho(u)||_{H^s} <= ||u||^3 on " + std::to_string(rho.trials) + " trials");
  }
  return r;
}

RunReport run_experiment(const RunConfig& cfg, const std::filesystem::path& out) {
  const auto& e = cfg.experiment;
  if (e == "simulate") return exp_simulate(cfg, out);
  if (e == "envelope") return exp_envelope_suite(cfg, out);
  if (e == "smoothing") return exp_smoothing(cfg, out);
  if (e == "attractor") return exp_attractor_probe(cfg, out);
  if (e == "kdv-limit") return exp_kdv_limit(cfg, out);
  if (e == "verify-identities") return exp_verify_identities(cfg, out);
  if (e == "estimate-constants") return exp_estimate_constants(cfg, out);
  throw ConfigError("unknown experiment '" + e + "'");
}

std::vector<RunConfig> default_envelope_suite() {
  struct Row {
    double gamma;
    const char* f;
    int fmode;
    double famp;
    const char* init;
    int imode;
    double iamp, sigma, l2;
  };
  const Row rows[] = {
      {0.5, "cos", 1, 1.0, "random", 1, 1.0, 1.5, 1.0},
      {0.5, "sin", 2, 0.5, "ball", 1, 1.0, 1.5, 1.0},
      {0.5, "random", 1, 1.0, "random", 1, 1.0, 1.0, 4.0},
      {1.0, "cos", 1, 1.0, "random", 1, 1.0, 1.5, 3.0},
      {1.0, "cos", 1, 2.0, "ball", 1, 1.0, 1.2, 1.0},
      {1.0, "random", 1, 0.5, "random", 1, 1.0, 2.0, 0.2},
      {1.0, "sin", 3, 1.0, "cos", 1, 2.0, 1.5, 1.0},
      {2.0, "cos", 1, 1.0, "random", 1, 1.0, 1.5, 5.0},
      {2.0, "random", 1, 2.0, "ball", 1, 1.0, 1.0, 1.0},
      {2.0, "cos", 2, 3.0, "random", 1, 1.0, 0.75, 1.0},
  };
  std::vector<RunConfig> out;
  std::uint64_t seed = 11;
  for (const Row& row : rows) {
    RunConfig c = default_config("envelope");
    c.K = 128;
    c.h = 1e-3;
    c.T = 20.0;
    c.gamma = row.gamma;
    c.forcing_profile = row.f;
    c.forcing_mode = row.fmode;
    c.forcing_amplitude = row.famp;
    c.init_profile = row.init;
    c.init_mode = row.imode;
    c.init_amplitude = row.iamp;
    c.init_sigma = row.sigma;
    c.init_l2 = row.l2;
    c.seed = seed++;
    c.sample_every = 100;
    out.push_back(c);
  }
  return out;
}

}  // namespace dampkdv
