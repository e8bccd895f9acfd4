#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "blowup/errors.hpp"
#include "lab/config.hpp"
#include "lab/plot_spec.hpp"
#include "lab/suite.hpp"

namespace {

constexpr const char* kSuites[] = {"profiles", "spectral", "kernel", "dynamics", "shoot", "physical", "all"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blowuplab: numerical verification suites"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config file");
  app.add_option("--out", out_dir, "output directory (BLOWUPLAB_OUT overrides)");
  app.add_option("--jobs", jobs, "worker threads for shooting")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for probe jitter");
  app.add_flag("-q,--quiet", quiet, "print only the PASS/FAIL lines");

  for (const char* name : kSuites) app.add_subcommand(name, std::string("run the ") + name + " suite");

  auto* plot = app.add_subcommand("plot", "write a plot specification for a CSV");
  std::string csv_path, kind_name, title;
  std::optional<double> slope, p;
  plot->add_option("csv", csv_path, "input CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--kind", kind_name, "decay_loglog, profile_overlay, trajectory_modes or winding_map")->required();
  plot->add_option("--slope", slope, "reference slope for decay_loglog");
  plot->add_option("--p", p, "exponent for the f(z) reference curve");
  plot->add_option("--title", title, "plot title");

  CLI11_PARSE(app, argc, argv);

  if (plot->parsed()) {
    try {
      lab::PlotOptions opts;
      opts.reference_slope = slope;
      opts.p = p;
      opts.title = title;
      std::cout << lab::emit_plot_spec(csv_path, lab::plot_kind_from_string(kind_name), opts) << "\n";
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "plot: " << e.what() << "\n";
      return 1;
    }
  }

  const std::string suite = app.get_subcommands().front()->get_name();
  lab::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = lab::load_config(config_path);
  } catch (const lab::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  if (jobs) cfg.run.jobs = *jobs;
  if (seed) cfg.run.seed = *seed;
  if (!out_dir.empty()) cfg.run.out = out_dir;
  if (const char* env = std::getenv("BLOWUPLAB_OUT"); env && *env) cfg.run.out = env;

  try {
    lab::SuiteOptions so;
    so.out_root = cfg.run.out;
    so.verbose = !quiet;
    const auto outcome = lab::run_suite(suite, cfg, so, std::cout);
    std::cout << (outcome.pass() ? "suite " + suite + ": PASS" : "suite " + suite + ": FAIL") << " ("
              << outcome.seconds << " s, artifacts in " << outcome.dir.string() << ")\n";
    return outcome.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "suite " << suite << ": " << e.what() << "\n";
    return 1;
  }
}
