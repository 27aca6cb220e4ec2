// SPDX-License-Identifier: Apache-2.0
// Batch runner for the localization/communication experiments.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ilac/config.hpp"
#include "ilac/experiments.hpp"
#include "ilac/localization.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ilac: multi-RIS localization and communication simulator"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "run one experiment and write a CSV");
  ilac::RunRequest req;
  std::string scenario;
  std::string out;
  bool print_config = false;
  run->add_option("--experiment", req.experiment, "experiment name")
      ->required()
      ->check(CLI::IsMember(ilac::experiment_names()));
  run->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", req.seed, "master seed")->required();
  run->add_option("--runs", req.runs, "Monte Carlo runs (default: from scenario)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out, "output CSV path")->required();
  run->add_option("--workers", req.workers, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--print-effective-config", print_config,
                "echo the validated configuration to stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    ilac::ScenarioConfig cfg = ilac::parse_scenario(scenario);
    if (print_config) std::cout << ilac::effective_config(cfg);
    auto rows = ilac::run_experiment(cfg, req);
    ilac::write_csv(out, rows);
  } catch (const ilac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
