// Command line front end: run / check / dispersion on a config file.
#include <CLI11.hpp>

#include <iostream>

#include "twophase/experiment.hpp"

namespace {

void print_summary(const twophase::ExperimentSummary& s) {
  for (const auto& note : s.notes) std::cout << "note: " << note << '\n';
  for (const auto& f : s.fits)
    std::cout << "fit " << f.name << ": alpha=" << f.alpha << " (predicted " << f.predicted
              << " +/- " << f.tolerance << ") " << (f.pass ? "PASS" : "FAIL") << '\n';
  for (const auto& c : s.checks)
    std::cout << "check " << c.name << ": " << c.value << " (threshold " << c.threshold << ") "
              << (c.pass ? "PASS" : "FAIL") << '\n';
  if (!s.error.empty()) std::cout << "error: " << s.error << '\n';
  std::cout << "output: " << s.output_dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-phase flow decay experiments"};
  app.set_version_flag("--version", std::string(twophase::version_string()));
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  bool deterministic = false;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output-dir", output_dir, "override output directory");
    sub->add_flag("--deterministic", deterministic, "ordered reductions (always on: single-threaded)");
    sub->add_flag("--quiet", quiet, "suppress progress messages");
  };
  auto* run = app.add_subcommand("run", "run the configured experiment");
  auto* check = app.add_subcommand("check", "validate a config and print it fully materialized");
  auto* disp = app.add_subcommand("dispersion", "write the dispersion table only");
  for (auto* sub : {run, check, disp}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  twophase::ExperimentConfig cfg;
  try {
    cfg = twophase::parse_config(config_path);
  } catch (const twophase::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  if (check->parsed()) {
    std::cout << twophase::serialize_config(cfg);
    return 0;
  }
  twophase::RunOptions options;
  if (!output_dir.empty()) options.output_dir = output_dir;
  options.deterministic = deterministic;
  options.quiet = quiet;
  const auto summary = disp->parsed() ? twophase::run_dispersion(cfg, options)
                                      : twophase::run_experiment(cfg, options);
  print_summary(summary);
  return summary.ok ? 0 : 1;
}
