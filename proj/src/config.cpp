#include "dampkdv/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace dampkdv {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad_type(const std::string& key, const char* expected, const json& got) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got " + got.dump());
}

void read(const std::string& key, const json& j, int& out) {
  if (!j.is_number_integer()) bad_type(key, "an integer", j);
  const auto v = j.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) bad_type(key, "a 32-bit integer", j);
  out = static_cast<int>(v);
}
void read(const std::string& key, const json& j, std::int64_t& out) {
  if (!j.is_number_integer()) bad_type(key, "an integer", j);
  out = j.get<std::int64_t>();
}
void read(const std::string& key, const json& j, std::uint64_t& out) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    bad_type(key, "a non-negative integer", j);
  out = j.get<std::uint64_t>();
}
void read(const std::string& key, const json& j, double& out) {
  if (!j.is_number()) bad_type(key, "a number", j);
  out = j.get<double>();
}
void read(const std::string& key, const json& j, std::string& out) {
  if (!j.is_string()) bad_type(key, "a string", j);
  out = j.get<std::string>();
}
template <class T>
void read(const std::string& key, const json& j, std::vector<T>& out) {
  if (!j.is_array()) bad_type(key, "an array", j);
  std::vector<T> tmp(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) read(key + "[" + std::to_string(i) + "]", j[i], tmp[i]);
  out = std::move(tmp);
}

struct Field {
  const char* key;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

template <class T>
Field field(const char* key, T RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return json(c.*member); },
          [key, member](RunConfig& c, const json& j) { read(key, j, c.*member); }};
}

template <class T>
Field tol_field(const char* key, T Tolerances::*member) {
  return {key, [member](const RunConfig& c) { return json(c.tol.*member); },
          [key, member](RunConfig& c, const json& j) { read(key, j, c.tol.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      field("grid.K", &RunConfig::K),
      field("grid.P", &RunConfig::P),
      field("gamma", &RunConfig::gamma),
      field("forcing.profile", &RunConfig::forcing_profile),
      field("forcing.mode", &RunConfig::forcing_mode),
      field("forcing.amplitude", &RunConfig::forcing_amplitude),
      field("forcing.sigma", &RunConfig::forcing_sigma),
      field("init.profile", &RunConfig::init_profile),
      field("init.mode", &RunConfig::init_mode),
      field("init.amplitude", &RunConfig::init_amplitude),
      field("init.sigma", &RunConfig::init_sigma),
      field("init.l2", &RunConfig::init_l2),
      field("seed", &RunConfig::seed),
      field("h", &RunConfig::h),
      field("T", &RunConfig::T),
      field("scheme", &RunConfig::scheme),
      field("s", &RunConfig::s),
      field("sample_every", &RunConfig::sample_every),
      field("ladder", &RunConfig::ladder),
      field("restart", &RunConfig::restart),
      field("ensemble.l2", &RunConfig::ensemble_l2),
      field("lattice.K", &RunConfig::lattice_K),
      field("lattice.s", &RunConfig::lattice_s),
      field("lattice.eps", &RunConfig::lattice_eps),
      field("trials", &RunConfig::trials),
      field("identities.bound", &RunConfig::identity_bound),
      field("identities.sampled_bound", &RunConfig::sampled_bound),
      field("identities.sampled_count", &RunConfig::sampled_count),
      field("identities.resonant_K", &RunConfig::resonant_K),
      field("nf.K", &RunConfig::nf_K),
      field("nf.t", &RunConfig::nf_t),
      field("nf.dt", &RunConfig::nf_dt),
      tol_field("tol.envelope", &Tolerances::envelope),
      tol_field("tol.ladder_ratio", &Tolerances::ladder_ratio),
      tol_field("tol.norm_growth", &Tolerances::norm_growth),
      tol_field("tol.radius_spread", &Tolerances::radius_spread),
      tol_field("tol.decay_radius", &Tolerances::decay_radius),
      tol_field("tol.conservation", &Tolerances::conservation),
      tol_field("tol.resonant", &Tolerances::resonant),
      tol_field("tol.nf_residual", &Tolerances::nf_residual),
      tol_field("tol.nf_ratio_lo", &Tolerances::nf_ratio_lo),
      tol_field("tol.nf_ratio_hi", &Tolerances::nf_ratio_hi),
      tol_field("tol.lattice_growth", &Tolerances::lattice_growth),
      tol_field("tol.kis_floor", &Tolerances::kis_floor),
      tol_field("tol.bilinear_growth", &Tolerances::bilinear_growth),
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (key == f.key) return &f;
  return nullptr;
}

const std::vector<std::string> kExperiments = {"simulate",  "envelope",          "smoothing",         "attractor",
                                               "kdv-limit", "verify-identities", "estimate-constants"};

bool known_profile(const std::string& p, bool init) {
  if (p == "zero" || p == "cos" || p == "sin" || p == "random") return true;
  return init && p == "ball";
}

}  // namespace

GridSpec RunConfig::grid() const {
  try {
    return P == 0 ? GridSpec::with_modes(K) : GridSpec::with_modes(K, P);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

double RunConfig::step() const { return h > 0.0 ? h : std::min(1e-3, 0.5 / K); }

Scheme RunConfig::time_scheme() const {
  if (scheme == "etdrk4") return Scheme::etdrk4;
  if (scheme == "ifrk4") return Scheme::ifrk4;
  throw ConfigError("scheme must be etdrk4 or ifrk4, got '" + scheme + "'");
}

nlohmann::json RunConfig::to_json() const {
  json out = json::object();
  out["experiment"] = experiment;
  for (const auto& f : fields()) out[f.key] = f.get(*this);
  return out;
}

std::string RunConfig::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig default_config(std::string_view experiment) {
  if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    throw ConfigError("unknown experiment '" + std::string(experiment) + "'");
  RunConfig c;
  c.experiment = std::string(experiment);
  if (experiment == "simulate") {
    c.T = 10.0;
  } else if (experiment == "envelope") {
    c.K = 128;
    c.h = 1e-3;
    c.init_l2 = 3.0;
  } else if (experiment == "smoothing") {
    c.K = 256;
    c.h = 1e-3;
    c.gamma = 0.5;
    c.init_sigma = 0.55;
    c.s = {0.5, 0.9};
  } else if (experiment == "attractor") {
    c.K = 64;
    c.h = 1e-3;
    c.gamma = 0.5;
    c.init_sigma = 1.0;
    c.T = 60.0;
  } else if (experiment == "kdv-limit") {
    c.K = 128;
    c.h = 1e-3;
    c.gamma = 0.0;
    c.forcing_profile = "zero";
    c.init_profile = "cos";
    c.T = 10.0;
    c.sample_every = 100;
  }
  return c;
}

RunConfig apply_json(RunConfig base, const nlohmann::json& flat) {
  if (!flat.is_object()) throw ConfigError("config must be a flat JSON object");
  for (const auto& [key, value] : flat.items()) {
    if (key == "experiment") {
      if (!value.is_string() || value.get<std::string>() != base.experiment)
        throw ConfigError("config key 'experiment': file is for " + value.dump() + ", running '" + base.experiment +
                          "'");
      continue;
    }
    const Field* f = find_field(key);
    if (!f) {
      std::string msg = "unknown config key '" + key + "'";
      if (value.is_object()) msg += " (nested objects are not accepted; use dotted keys such as 'grid.K')";
      throw ConfigError(msg);
    }
    f->set(base, value);
  }
  return base;
}

RunConfig apply_override(RunConfig base, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override '" + std::string(assignment) + "': expected key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json flat = json::object();
  flat[key] = std::move(value);
  return apply_json(std::move(base), flat);
}

nlohmann::json parse_config_text(std::string_view text, std::string_view origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte offset -> line/column
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << origin << ":" << line << ":" << col << ": malformed JSON";
    const std::string what = e.what();
    const auto at = what.find("syntax error");
    if (at != std::string::npos) msg << " (" << what.substr(at) << ")";
    throw ConfigError(msg.str());
  }
}

RunConfig load_config(std::string_view experiment, const std::optional<std::filesystem::path>& file,
                      const std::vector<std::string>& overrides) {
  RunConfig cfg = default_config(experiment);
  if (file) {
    std::ifstream in(*file, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + file->string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const json flat = parse_config_text(text, file->string());
    try {
      cfg = apply_json(std::move(cfg), flat);
    } catch (const ConfigError& e) {
      throw ConfigError(file->string() + ": " + e.what());
    }
  }
  for (const auto& o : overrides) cfg = apply_override(std::move(cfg), o);
  validate(cfg);
  return cfg;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.K >= 1, "grid.K must be >= 1");
  require(c.P == 0 || c.P >= 3 * c.K + 1, "grid.P must be 0 (auto) or >= 3*grid.K+1");
  require(std::isfinite(c.gamma) && c.gamma >= 0.0, "gamma must be >= 0");
  require(c.gamma > 0.0 || c.experiment == "kdv-limit", "gamma must be > 0 (gamma = 0 only for kdv-limit)");
  require(known_profile(c.forcing_profile, false), "forcing.profile must be zero, cos, sin or random");
  require(known_profile(c.init_profile, true), "init.profile must be zero, cos, sin, random or ball");
  require(c.forcing_mode >= 1 && c.forcing_mode <= c.K, "forcing.mode must lie in [1, grid.K]");
  require(c.init_mode >= 1 && c.init_mode <= c.K, "init.mode must lie in [1, grid.K]");
  require(std::isfinite(c.forcing_amplitude) && std::isfinite(c.init_amplitude), "amplitudes must be finite");
  require(std::isfinite(c.forcing_sigma) && std::isfinite(c.init_sigma), "sigma must be finite");
  require(c.init_profile != "random" || c.init_l2 > 0.0, "init.l2 must be > 0 for the random profile");
  require(c.forcing_profile != "random" || c.forcing_amplitude > 0.0,
          "forcing.amplitude must be > 0 for the random profile");
  require(c.init_profile != "ball" || (c.forcing_profile != "zero" && c.forcing_amplitude != 0.0),
          "init.profile = ball needs nonzero forcing");
  require(std::isfinite(c.h) && c.h >= 0.0, "h must be >= 0 (0 selects the default step)");
  require(std::isfinite(c.T) && c.T > 0.0, "T must be > 0");
  require(c.scheme == "etdrk4" || c.scheme == "ifrk4", "scheme must be etdrk4 or ifrk4");
  require(c.sample_every >= 1, "sample_every must be >= 1");
  require(!c.s.empty(), "s must list at least one index");
  for (double s : c.s) require(std::isfinite(s) && s >= 0.0, "s entries must be >= 0");
  for (int k : c.ladder) require(k >= 1, "ladder entries must be >= 1");
  for (std::size_t i = 1; i < c.ladder.size(); ++i)
    require(c.ladder[i] > c.ladder[i - 1], "ladder must be strictly increasing");
  require(std::isfinite(c.restart) && c.restart >= 0.0, "restart must be >= 0");
  for (double l : c.ensemble_l2) require(l > 0.0 && std::isfinite(l), "ensemble.l2 entries must be > 0");
  for (int k : c.lattice_K) require(k >= 1, "lattice.K entries must be >= 1");
  for (double e : c.lattice_eps) require(e > 0.0 && e < 1.0 / 22.0, "lattice.eps entries must lie in (0, 1/22)");
  for (double s : c.lattice_s) require(s >= 0.0 && s < 1.0, "lattice.s entries must lie in [0, 1)");
  require(c.trials >= 1, "trials must be >= 1");
  require(c.identity_bound >= 1 && c.identity_bound <= 100000, "identities.bound must lie in [1, 1e5]");
  require(c.sampled_bound >= 1, "identities.sampled_bound must be >= 1");
  require(c.sampled_count >= 0, "identities.sampled_count must be >= 0");
  require(c.resonant_K >= 1, "identities.resonant_K must be >= 1");
  require(c.nf_K >= 1 && c.nf_K <= 128, "nf.K must lie in [1, 128]");
  require(c.nf_t > 0.0 && c.nf_dt > 0.0 && c.nf_dt < c.nf_t, "nf.t and nf.dt must satisfy 0 < dt < t");
}

}  // namespace dampkdv
