#pragma once

// Machine-readable outcomes: report.json (verdicts, measured quantities, tolerances) and
// per-run trajectory CSVs.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dampkdv/flow.hpp"
#include "dampkdv/spectral.hpp"

namespace dampkdv {

const char* version_string();

/// One asserted relation `value <relation> limit`. NaN never passes.
struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "=="
  double limit = 0.0;
  std::string note;
};

struct RunReport {
  std::string experiment;
  std::string config_hash;
  std::string version = version_string();
  nlohmann::json config = nlohmann::json::object();
  std::vector<Check> checks;
  std::map<std::string, double> measured;
  std::vector<std::string> artifacts;    // files written next to the report
  std::vector<std::string> diagnostics;  // human-readable notes, e.g. "horizon"
  double wall_seconds = 0.0;             // kept out of report.json

  bool passed() const;
  const Check* find(const std::string& name) const;

  Check& check(std::string name, double value, std::string relation, double limit, std::string note = {});
  void measure(const std::string& key, double value) { measured[key] = value; }
  /// Appends another report's checks/measurements with `prefix` + "." on every name.
  void absorb(const RunReport& other, const std::string& prefix);
};

/// NaN-aware equality (NaN == NaN); wall time ignored.
bool same_report(const RunReport& a, const RunReport& b);
bool operator==(const Check& a, const Check& b);

nlohmann::json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);

/// Throws std::runtime_error naming the path on I/O failure.
void write_report_json(const RunReport& r, const std::filesystem::path& path);
RunReport read_report_json(const std::filesystem::path& path);
void write_timing_json(const RunReport& r, const std::filesystem::path& path);

/// Derived columns of a trajectory CSV.
struct CsvColumns {
  CoefSeq u0;
  double gamma = 0.0;
  double f_l2 = 0.0;
  std::vector<double> s;
};

/// Header: t,l2_norm,envelope,hs_gap_s{v}...,hs_norm_s{v}...  values printed with 17 significant digits.
/// hs_gap is ||u(t) - e^{-gamma t} e^{tL} u0||_{H^s}; envelope degenerates to ||u0|| + ||f|| t when gamma = 0.
std::string csv_header(const std::vector<double>& s);
void write_trajectory_csv(const TrajectoryRecord& traj, const CsvColumns& cols, const std::filesystem::path& path);

/// "%.17g", with nan / inf / -inf spelled out.
std::string format_double(double v);
/// Shortest "%g" form used in column names, e.g. 0.5 -> "0.5".
std::string format_index(double s);

}  // namespace dampkdv
