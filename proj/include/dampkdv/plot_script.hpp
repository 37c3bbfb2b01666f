#pragma once

// gnuplot scripts for the CSVs written by the experiments. Scripts refer to CSVs by relative
// name and are meant to be run from the output directory: `gnuplot plot.gp`.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace dampkdv {

class PlotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV files the script knows how to draw: trajectory.csv, smoothing_K<K>.csv, attractor_m<i>.csv.
std::vector<std::string> plottable_csvs(const std::filesystem::path& dir);

/// Script text for the CSVs in `dir`. Throws PlotError naming the expected files when none are
/// present, or naming the missing ones when report.json lists CSVs that are absent.
std::string plot_script_text(const std::filesystem::path& dir);

/// Writes dir/plot.gp and returns its path.
std::filesystem::path emit_plot_script(const std::filesystem::path& dir);

}  // namespace dampkdv
