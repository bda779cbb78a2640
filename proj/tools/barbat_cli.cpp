// Command-line experiment runner.
//
//   barbat run --config FILE [--set key=value]... --out DIR [--workers N]
//   barbat sweep --configs FILE... --out DIR [--workers N] [--set key=value]...
//   barbat validate --config FILE [--set key=value]...
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "barbat/harness/config.hpp"
#include "barbat/harness/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::size_t default_workers() {
  return std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
}

int report_config_error(const barbat::harness::ConfigError& e) {
  std::cerr << e.what() << "\n";
  return kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  namespace h = barbat::harness;
  CLI::App app{"Corruption-robust bandit experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> config_paths;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::size_t workers = default_workers();

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--set", overrides, "Override, key=value");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Run several experiments and compare them");
  sweep->add_option("--configs", config_paths, "Config files")->required();
  sweep->add_option("--set", overrides, "Override applied to every config, key=value");
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", config_path, "Config file")->required();
  validate->add_option("--set", overrides, "Override, key=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*validate) {
      const auto config = h::load_config(config_path, overrides);
      for (const auto& [key, value] : h::describe(config)) std::cout << key << " = " << value << "\n";
      return kOk;
    }
    if (*run) {
      const auto config = h::load_config(config_path, overrides);
      const auto summary = h::run_experiment(config, out_dir, workers);
      std::cout << summary.label << ": final mean regret " << summary.final_mean << " +/- "
                << summary.final_std << " over " << summary.trials << " trials, "
                << summary.mean_trial_seconds << " s per trial\n";
      return kOk;
    }
    const auto entries = h::sweep(config_paths, out_dir, workers, overrides);
    bool any_config_error = false;
    bool any_runtime_error = false;
    for (const auto& e : entries) {
      if (e.ok) {
        std::cout << e.summary.label << ": " << e.summary.final_mean << " +/- " << e.summary.final_std
                  << " (" << e.summary.mean_trial_seconds << " s per trial)\n";
      } else {
        std::cerr << e.source << ": " << e.error << "\n";
        (e.config_error ? any_config_error : any_runtime_error) = true;
      }
    }
    if (any_runtime_error) return kRuntimeError;
    return any_config_error ? kConfigError : kOk;
  } catch (const h::ConfigError& e) {
    return report_config_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
