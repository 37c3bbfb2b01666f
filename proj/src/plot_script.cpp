#include "dampkdv/plot_script.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

namespace dampkdv {

namespace fs = std::filesystem;

namespace {

const std::regex kSmoothing(R"(smoothing_K(\d+)\.csv)");
const std::regex kAttractor(R"(attractor_m(\d+)\.csv)");

std::vector<std::string> header_of(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  if (!in || !std::getline(in, line)) throw PlotError("cannot read header of " + csv.filename().string());
  std::vector<std::string> cols;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  return cols;
}

std::vector<std::string> columns_with_prefix(const std::vector<std::string>& header, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& c : header)
    if (c.rfind(prefix, 0) == 0) out.push_back(c);
  return out;
}

// Files matching `re`, ordered by the captured integer.
std::vector<std::string> numbered(const std::vector<std::string>& names, const std::regex& re) {
  std::vector<std::pair<long, std::string>> hits;
  for (const auto& n : names) {
    std::smatch m;
    if (std::regex_match(n, m, re)) hits.emplace_back(std::stol(m[1].str()), n);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::string> out;
  for (auto& h : hits) out.push_back(std::move(h.second));
  return out;
}

std::string capture(const std::string& name, const std::regex& re) {
  std::smatch m;
  std::regex_match(name, m, re);
  return m[1].str();
}

void plot_lines(std::ostringstream& s, const std::vector<std::string>& files, const std::string& column,
                const std::string& label_prefix, const std::regex& re) {
  s << "plot ";
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (i) s << ", \\\n     ";
    s << "'" << files[i] << "' using 1:'" << column << "' with lines title '" << label_prefix << capture(files[i], re)
      << "'";
  }
  s << "\n";
}

}  // namespace

std::vector<std::string> plottable_csvs(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) return names;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string n = e.path().filename().string();
    if (n == "trajectory.csv" || std::regex_match(n, kSmoothing) || std::regex_match(n, kAttractor)) names.push_back(n);
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string plot_script_text(const fs::path& dir) {
  const auto names = plottable_csvs(dir);

  // CSVs promised by the report must all be present.
  const fs::path report = dir / "report.json";
  if (fs::exists(report)) {
    std::ifstream in(report);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.contains("artifacts")) {
      std::vector<std::string> missing;
      for (const auto& a : j["artifacts"]) {
        const auto n = a.get<std::string>();
        if (n.size() > 4 && n.substr(n.size() - 4) == ".csv" && !fs::exists(dir / n)) missing.push_back(n);
      }
      if (!missing.empty()) {
        std::string msg = "missing CSVs in " + dir.string() + ":";
        for (const auto& m : missing) msg += " " + m;
        throw PlotError(msg);
      }
    }
  }
  if (names.empty())
    throw PlotError("no plottable CSVs in " + dir.string() +
                    "; expected trajectory.csv, smoothing_K<K>.csv (one per rung) or attractor_m<i>.csv");

  std::ostringstream s;
  s << "# gnuplot script; run from this directory: gnuplot plot.gp\n"
    << "set datafile separator ','\n"
    << "set terminal svg size 900,600 dynamic\n"
    << "set xlabel 't'\n"
    << "set key top right\n";

  if (std::find(names.begin(), names.end(), "trajectory.csv") != names.end()) {
    s << "\nset output 'envelope.svg'\n"
      << "set title 'l2 norm against the energy envelope'\n"
      << "plot 'trajectory.csv' using 1:'l2_norm' with lines title '||u(t)||', \\\n"
      << "     'trajectory.csv' using 1:'envelope' with lines dashtype 2 title 'envelope'\n";
  }

  const auto ladder = numbered(names, kSmoothing);
  if (!ladder.empty()) {
    for (const auto& col : columns_with_prefix(header_of(dir / ladder.front()), "hs_gap_s")) {
      const std::string s_value = col.substr(8);
      s << "\nset output 'smoothing_s" << s_value << ".svg'\n"
        << "set title 'H^s gap to the linear flow, s = " << s_value << "'\n";
      plot_lines(s, ladder, col, "K = ", kSmoothing);
    }
  }

  const auto members = numbered(names, kAttractor);
  if (!members.empty()) {
    for (const auto& col : columns_with_prefix(header_of(dir / members.front()), "hs_norm_s")) {
      const std::string s_value = col.substr(9);
      s << "\nset output 'attractor_s" << s_value << ".svg'\n"
        << "set title 'H^s norm per ensemble member, s = " << s_value << "'\n";
      plot_lines(s, members, col, "member ", kAttractor);
    }
  }
  return s.str();
}

fs::path emit_plot_script(const fs::path& dir) {
  const std::string text = plot_script_text(dir);
  const fs::path path = dir / "plot.gp";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw PlotError("cannot write " + path.string());
  out << text;
  return path;
}

}  // namespace dampkdv
