#include "dampkdv/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

#include "dampkdv/config.hpp"
#include "dampkdv/experiments.hpp"
#include "dampkdv/plot_script.hpp"
#include "dampkdv/report.hpp"

namespace dampkdv {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  std::string plot_dir;
};

const std::vector<std::pair<const char*, const char*>> kSubcommands = {
    {"simulate", "evolve one trajectory and write trajectory.csv"},
    {"verify-identities", "phase identities, resonance partition, resonant cancellation, normal-form residuals"},
    {"estimate-constants", "lattice suprema (kis, multiplier) and empirical operator constants"},
    {"smoothing", "H^s gap to the linear flow along a K ladder"},
    {"envelope", "energy envelope, invariant ball and absorbing time"},
    {"attractor", "late-time H^s radii over an ensemble of initial data"},
    {"kdv-limit", "l2 conservation with gamma = f = 0"},
};

RunReport failure_report(const std::string& experiment, const std::string& what, const std::string& check_name) {
  RunReport r;
  r.experiment = experiment;
  r.check(check_name, 0.0, "==", 1.0, what);
  r.diagnostics.push_back(what);
  return r;
}

void print_summary(const RunReport& r, const fs::path& dir, std::ostream& out) {
  for (const auto& c : r.checks)
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << format_double(c.value) << " " << c.relation << " "
        << format_double(c.limit) << "\n";
  for (const auto& d : r.diagnostics) out << "note: " << d << "\n";
  out << (r.passed() ? "all checks passed" : "some checks failed") << "; report: " << (dir / "report.json").string()
      << "\n";
}

}  // namespace

fs::path resolve_output_dir(const fs::path& explicit_dir, const std::string& experiment) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("DAMPKDV_OUT"); env && *env) return fs::path(env) / experiment;
  return fs::path("dampkdv_out") / experiment;
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral toolkit for the forced, weakly damped KdV equation on the torus"};
  app.require_subcommand(1);
  Options opt;
  for (const auto& [name, desc] : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", opt.config, "flat JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--set", opt.sets, "override a config key, key=value (repeatable)")->allow_extra_args(false);
    sub->add_option("--seed", opt.seed, "random seed (overrides config)");
    sub->add_flag("--quiet", opt.quiet, "print nothing on success");
  }
  CLI::App* plot = app.add_subcommand("plot", "write plot.gp for the CSVs in a result directory");
  plot->add_option("dir", opt.plot_dir, "result directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitConfig;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  if (name == "plot") {
    try {
      const fs::path p = emit_plot_script(opt.plot_dir);
      if (!opt.quiet) out << "wrote " << p.string() << "\n";
      return kExitPass;
    } catch (const PlotError& e) {
      err << "plot: " << e.what() << "\n";
      return kExitConfig;
    }
  }

  const fs::path dir = resolve_output_dir(opt.out, name);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << "cannot create output directory " << dir.string() << ": " << ec.message() << "\n";
    return kExitConfig;
  }

  auto finish = [&](RunReport& r, int code) {
    try {
      write_report_json(r, dir / "report.json");
      write_timing_json(r, dir / "timing.json");
      if (!plottable_csvs(dir).empty()) emit_plot_script(dir);
    } catch (const std::exception& e) {
      err << "error writing results: " << e.what() << "\n";
      return code == kExitPass ? kExitAssertion : code;
    }
    if (!opt.quiet || code != kExitPass) print_summary(r, dir, code == kExitPass ? out : err);
    return code;
  };

  RunConfig cfg;
  try {
    const std::optional<fs::path> file = opt.config.empty() ? std::nullopt : std::optional<fs::path>(opt.config);
    cfg = load_config(name, file, opt.sets);
    if (opt.seed) cfg.seed = *opt.seed;
    validate(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    RunReport r = failure_report(name, std::string("config error: ") + e.what(), "config.valid");
    return finish(r, kExitConfig);
  }

  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  int code = kExitPass;
  try {
    report = run_experiment(cfg, dir);
    code = report.passed() ? kExitPass : kExitAssertion;
  } catch (const SolverFailure& e) {
    report = failure_report(name, "solver failure at t = " + format_double(e.time()) + ": " + e.what(), "solver.finite");
    report.config_hash = cfg.hash();
    report.config = cfg.to_json();
    code = kExitSolver;
  } catch (const ConfigError& e) {
    report = failure_report(name, std::string("config error: ") + e.what(), "config.valid");
    code = kExitConfig;
  } catch (const std::invalid_argument& e) {
    report = failure_report(name, std::string("invalid input: ") + e.what(), "config.valid");
    code = kExitConfig;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return finish(report, code);
}

}  // namespace dampkdv
