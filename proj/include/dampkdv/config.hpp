#pragma once

// Run configuration: a flat JSON object with dotted keys, e.g.
//   { "grid.K": 128, "gamma": 0.5, "forcing.profile": "cos", "init.l2": 2.0, "s": [0.5, 0.9] }
// Precedence: built-in defaults for the experiment < config file < --set overrides < --seed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dampkdv/flow.hpp"
#include "dampkdv/spectral.hpp"

namespace dampkdv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double envelope = 1e-6;      // norm above the energy envelope / invariant ball
  double ladder_ratio = 1.05;  // top-rung ratio of the smoothing gap
  double norm_growth = 1.3;    // minimum H^s growth of u0 per doubling
  double radius_spread = 0.10; // attractor radii, (max - min) / min
  double decay_radius = 1e-6;  // attractor radius when f = 0
  double conservation = 1e-8;  // KdV limit
  double resonant = 1e-12;     // resonant cancellation
  double nf_residual = 1e-5;
  double nf_ratio_lo = 3.0;    // residual(2 dt) / residual(dt)
  double nf_ratio_hi = 5.0;
  double lattice_growth = 1.05;
  double kis_floor = 0.9;      // kis min at largest K >= kis_floor * min at smallest K
  double bilinear_growth = 1.05;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct RunConfig {
  std::string experiment = "simulate";

  int K = 64;
  int P = 0;  // 0: smallest 5-smooth P >= 3K+1
  double gamma = 1.0;

  // forcing: "zero", "cos" (amplitude cos(mode x)), "sin", "random" (||f|| = amplitude, decay sigma)
  std::string forcing_profile = "cos";
  int forcing_mode = 1;
  double forcing_amplitude = 1.0;
  double forcing_sigma = 2.0;

  // initial data: "zero", "cos"/"sin" (amplitude trig(mode x)), "random" (||u0|| = l2, decay sigma),
  // "ball" (random with ||u0|| = ||f||/gamma)
  std::string init_profile = "random";
  int init_mode = 1;
  double init_amplitude = 1.0;
  double init_sigma = 1.5;
  double init_l2 = 1.0;

  std::uint64_t seed = 1;
  double h = 0.0;  // 0: min(1e-3, 0.5/K)
  double T = 20.0;
  std::string scheme = "etdrk4";  // or "ifrk4"
  std::vector<double> s{0.5};
  int sample_every = 10;

  // smoothing
  std::vector<int> ladder{64, 128, 256};
  double restart = 5.0;

  // attractor ensemble: member i uses seed + i and ||u0|| = ensemble_l2[i]
  std::vector<double> ensemble_l2{0.5, 1.0, 2.0, 4.0};

  // lattice and operator constants
  std::vector<int> lattice_K{16, 32, 64};
  std::vector<double> lattice_s{0.5, 0.9};
  std::vector<double> lattice_eps{0.005, 0.01};
  int trials = 10000;

  // identities
  int identity_bound = 1000;
  std::int64_t sampled_bound = 1000000;
  int sampled_count = 1000000;
  int resonant_K = 64;
  int nf_K = 32;
  double nf_t = 0.5;
  double nf_dt = 2.5e-5;

  Tolerances tol;

  GridSpec grid() const;
  double step() const;
  Scheme time_scheme() const;

  /// Flat JSON with every key, sorted.
  nlohmann::json to_json() const;
  /// FNV-1a (64-bit, hex) of the compact flat JSON.
  std::string hash() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Defaults for a named experiment (simulate, envelope, smoothing, attractor, kdv-limit,
/// verify-identities, estimate-constants). Throws ConfigError for unknown names.
RunConfig default_config(std::string_view experiment);

/// Applies a flat JSON object on top of `base`. Unknown keys and wrongly typed values throw
/// ConfigError naming the key.
RunConfig apply_json(RunConfig base, const nlohmann::json& flat);

/// "key=value"; the value is read as JSON when it parses, otherwise as a string.
RunConfig apply_override(RunConfig base, std::string_view assignment);

/// Parses config text; parse errors report line and column.
nlohmann::json parse_config_text(std::string_view text, std::string_view origin = "<config>");

/// defaults(experiment) <- file <- overrides.
RunConfig load_config(std::string_view experiment, const std::optional<std::filesystem::path>& file,
                      const std::vector<std::string>& overrides);

/// Checks cross-field invariants (K >= 1, gamma >= 0, h >= 0, T > 0, ...). Throws ConfigError.
void validate(const RunConfig& cfg);

}  // namespace dampkdv
