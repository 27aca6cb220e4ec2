// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "ilac/harness.hpp"

namespace ilac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NodeConfig {
  std::array<double, 3> position{};
  std::array<std::array<double, 3>, 3> orientation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  std::array<int, 2> array{1, 1};
};

struct UeConfig : NodeConfig {
  std::vector<double> kappa;
};

struct ExperimentSettings {
  int runs = 50;
  std::vector<double> kappas{1, 5, 50};
  std::vector<int> peb_pilots{10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
  std::vector<int> scheme_pilots{10, 30, 50};
  double outage_probability = 0.1;
  int mobility_pilots = 20;
  std::vector<double> mobility_times{0.5, 1.0, 1.5, 2.0};
  int chest_phase1_pilots = 10;
  std::vector<int> chest_phase2_pilots{2, 4, 8, 12, 16, 24, 32};
  int effective_phase1_pilots = 20;
  std::vector<int> effective_phase2_pilots{2, 4, 8, 10, 12, 14, 16, 20, 24, 32, 48, 64, 96};
  std::vector<double> effective_kappas{50, 5};
};

struct ScenarioConfig {
  int schema_version = 1;
  // rf
  double carrier_hz = 28e9;
  double tx_gain = 2.5;
  double rx_gain = 2.5;
  double cell_gain = kPi;
  double pattern_q = 0.57;
  double pathloss_alpha = 2.0;
  double noise_figure_db = 5.0;
  double noise_density_dbm_hz = -169.0;
  double bandwidth_hz = 120e3;
  double spacing_wavelengths = 0.5;
  double total_power_w = 1e-3;
  double direct_nlos_pathloss_db = 130.0;
  // geometry
  NodeConfig bs;
  std::vector<NodeConfig> ris;
  std::vector<UeConfig> ue;
  // timing
  double location_interval_s = 1.0;
  double coherence_time_s = 1e-3;
  // uncertainty
  bool planar = true;
  std::array<double, 3> prior_variance{2, 2, 0};
  std::array<double, 3> step_std{1e-3, 1e-3, 0};
  // algorithms
  int marginal_samples = 2000;
  int ensemble_positions = 64;
  int ensemble_nlos = 8;
  int phase1_pool_slots = 120;
  int ris_max_iterations = 50;
  double ris_rel_tol = 1e-4;
  int wmmse_max_iterations = 100;
  double wmmse_rel_tol = 1e-5;

  ExperimentSettings experiments;

  Scenario build_scenario() const;
  FrameTiming timing() const;
  PipelineOptions pipeline(int workers) const;
};

ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig parse_scenario(const std::string& path);

// Canonical YAML; parsing it yields the same config and re-emits identical bytes.
std::string effective_config(const ScenarioConfig& cfg);

}  // namespace ilac
