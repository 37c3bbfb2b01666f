#pragma once

// Named experiments. Each returns a RunReport whose checks encode the asserted inequalities;
// when `out` is non-empty, CSV artifacts are written there (report.json is the caller's job).

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dampkdv/config.hpp"
#include "dampkdv/flow.hpp"
#include "dampkdv/report.hpp"

namespace dampkdv {

CoefSeq make_forcing(const RunConfig& cfg, GridSpec grid);
/// Initial data for the configured profile; `l2` overrides init.l2 for the random profile.
CoefSeq make_initial(const RunConfig& cfg, GridSpec grid, std::uint64_t seed, double l2);
CoefSeq make_initial(const RunConfig& cfg, GridSpec grid);
FlowParams make_flow(const RunConfig& cfg, GridSpec grid);

/// Time t at which the energy envelope reaches 2||f||/gamma (0 when ||u0|| <= 2||f||/gamma).
double absorption_prediction(double u0_l2, double f_l2, double gamma);

struct Absorption {
  bool reached = false;  // the last sample lies inside the ball
  double time = 0.0;     // first t after which every sample satisfies ||u|| < 2||f||/gamma
};
Absorption measure_absorption(const std::vector<double>& times, const std::vector<double>& norms, double f_l2,
                              double gamma);

/// max_i (norms[i] - envelope(times[i]))
double envelope_violation(const std::vector<double>& times, const std::vector<double>& norms, double u0_l2,
                          double f_l2, double gamma);

/// Norm series recorded at every step plus sparse state samples.
struct NormSeries {
  std::vector<double> times, norms;
  TrajectoryRecord samples;
};
NormSeries run_with_norms(const CoefSeq& u0, double T, const FlowParams& params, int sample_every);

RunReport exp_simulate(const RunConfig& cfg, const std::filesystem::path& out = {});
RunReport exp_energy_envelope(const RunConfig& cfg, const std::filesystem::path& out = {});
/// Requires ||f|| > 0. A horizon too short to reach the ball fails with a "horizon" diagnostic.
RunReport exp_absorbing_ball(const RunConfig& cfg, const std::filesystem::path& out = {});
/// Envelope and absorbing ball on one shared trajectory (the `envelope` subcommand).
RunReport exp_envelope_suite(const RunConfig& cfg, const std::filesystem::path& out = {});
RunReport exp_smoothing(const RunConfig& cfg, const std::filesystem::path& out = {});
RunReport exp_kdv_limit(const RunConfig& cfg, const std::filesystem::path& out = {});
RunReport exp_attractor_probe(const RunConfig& cfg, const std::filesystem::path& out = {});
RunReport exp_verify_identities(const RunConfig& cfg, const std::filesystem::path& out = {});
RunReport exp_estimate_constants(const RunConfig& cfg, const std::filesystem::path& out = {});

/// Dispatch by cfg.experiment.
RunReport run_experiment(const RunConfig& cfg, const std::filesystem::path& out = {});

/// Ten envelope configurations: gamma in {0.5, 1, 2}, nonzero forcing, several starting on the
/// invariant ball; K = 128, h = 1e-3, T = 20.
std::vector<RunConfig> default_envelope_suite();

/// Normal-form residual study on one trajectory.
struct NfCase {
  int K = 32;
  double gamma = 1.0;
  std::string forcing_profile = "cos";
  int forcing_mode = 1;
  double forcing_amplitude = 1.0;
  double init_sigma = 1.5;
  double init_l2 = 1.0;
  std::uint64_t seed = 3;
  double t = 0.5;
  double dt = 2.5e-5;
};
struct NfStudy {
  double residual = 0.0;         // at dt
  double residual_coarse = 0.0;  // at 2 dt
  double ratio = 0.0;            // residual_coarse / residual
  double lattice_residual = 0.0; // closure without the cutoff correction, at dt
  double one_third_coefficient_residual = 0.0;  // cross coefficient -1/3, at dt
  double integrated_residual = 0.0;         // Simpson over [t - 2dt, t + 2dt]
};
/// Trajectory step h = dt/4.
NfStudy nf_study(const NfCase& c);
std::vector<NfCase> default_nf_cases(const RunConfig& cfg);

}  // namespace dampkdv
