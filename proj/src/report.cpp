#include "dampkdv/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dampkdv/normal_form.hpp"

#ifndef DAMPKDV_VERSION
#define DAMPKDV_VERSION "0.0.0"
#endif

namespace dampkdv {

namespace {

using json = nlohmann::json;

// JSON has no non-finite numbers; they travel as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double to_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw std::invalid_argument("report: expected a number, got " + j.dump());
}

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool holds(double value, const std::string& rel, double limit) {
  if (std::isnan(value) || std::isnan(limit)) return false;
  if (rel == "<=") return value <= limit;
  if (rel == ">=") return value >= limit;
  if (rel == "==") return value == limit;
  throw std::invalid_argument("report: unknown relation '" + rel + "'");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

const char* version_string() { return DAMPKDV_VERSION; }

bool RunReport::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const Check* RunReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Check& RunReport::check(std::string name, double value, std::string relation, double limit, std::string note) {
  Check c;
  c.pass = holds(value, relation, limit);
  c.name = std::move(name);
  c.value = value;
  c.relation = std::move(relation);
  c.limit = limit;
  c.note = std::move(note);
  checks.push_back(std::move(c));
  return checks.back();
}

void RunReport::absorb(const RunReport& other, const std::string& prefix) {
  for (auto c : other.checks) {
    c.name = prefix + "." + c.name;
    checks.push_back(std::move(c));
  }
  for (const auto& [k, v] : other.measured) measured[prefix + "." + k] = v;
  for (const auto& a : other.artifacts) artifacts.push_back(a);
  for (const auto& d : other.diagnostics) diagnostics.push_back(prefix + ": " + d);
}

bool operator==(const Check& a, const Check& b) {
  return a.name == b.name && a.pass == b.pass && same_double(a.value, b.value) && a.relation == b.relation &&
         same_double(a.limit, b.limit) && a.note == b.note;
}

bool same_report(const RunReport& a, const RunReport& b) {
  if (a.experiment != b.experiment || a.config_hash != b.config_hash || a.version != b.version ||
      a.config != b.config || a.checks != b.checks || a.artifacts != b.artifacts || a.diagnostics != b.diagnostics ||
      a.measured.size() != b.measured.size())
    return false;
  for (auto ia = a.measured.begin(), ib = b.measured.begin(); ia != a.measured.end(); ++ia, ++ib)
    if (ia->first != ib->first || !same_double(ia->second, ib->second)) return false;
  return true;
}

nlohmann::json to_json(const RunReport& r) {
  json j;
  j["experiment"] = r.experiment;
  j["config_hash"] = r.config_hash;
  j["version"] = r.version;
  j["config"] = r.config;
  j["passed"] = r.passed();
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"value", number(c.value)},
                      {"relation", c.relation},
                      {"limit", number(c.limit)},
                      {"note", c.note}});
  }
  j["checks"] = std::move(checks);
  json measured = json::object();
  for (const auto& [k, v] : r.measured) measured[k] = number(v);
  j["measured"] = std::move(measured);
  j["artifacts"] = r.artifacts;
  j["diagnostics"] = r.diagnostics;
  return j;
}

RunReport report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.config = j.at("config");
  for (const auto& c : j.at("checks")) {
    Check ck;
    ck.name = c.at("name").get<std::string>();
    ck.pass = c.at("pass").get<bool>();
    ck.value = to_number(c.at("value"));
    ck.relation = c.at("relation").get<std::string>();
    ck.limit = to_number(c.at("limit"));
    ck.note = c.at("note").get<std::string>();
    r.checks.push_back(std::move(ck));
  }
  for (const auto& [k, v] : j.at("measured").items()) r.measured[k] = to_number(v);
  r.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  return r;
}

void write_report_json(const RunReport& r, const std::filesystem::path& path) {
  write_text(path, to_json(r).dump(2) + "\n");
}

RunReport read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return report_from_json(json::parse(ss.str()));
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_timing_json(const RunReport& r, const std::filesystem::path& path) {
  json j;
  j["experiment"] = r.experiment;
  j["config_hash"] = r.config_hash;
  j["wall_seconds"] = number(r.wall_seconds);
  write_text(path, j.dump(2) + "\n");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_index(double s) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", s);
  return buf;
}

std::string csv_header(const std::vector<double>& s) {
  std::string h = "t,l2_norm,envelope";
  for (double v : s) h += ",hs_gap_s" + format_index(v);
  for (double v : s) h += ",hs_norm_s" + format_index(v);
  return h;
}

void write_trajectory_csv(const TrajectoryRecord& traj, const CsvColumns& cols, const std::filesystem::path& path) {
  std::vector<SobolevIndex> idx;
  for (double v : cols.s) idx.emplace_back(v);
  const double u0_l2 = l2_norm(cols.u0);

  std::string text = csv_header(cols.s) + "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const CoefSeq& u = traj.states[i];
    const double env = cols.gamma > 0.0 ? energy_envelope(t, u0_l2, cols.f_l2, cols.gamma) : u0_l2 + cols.f_l2 * t;
    text += format_double(t) + "," + format_double(traj.l2_norms[i]) + "," + format_double(env);
    for (const auto& s : idx) text += "," + format_double(duhamel_gap(cols.u0, u, t, cols.gamma, s));
    for (const auto& s : idx) text += "," + format_double(sobolev_norm(u, s));
    text += "\n";
  }
  write_text(path, text);
}

}  // namespace dampkdv
