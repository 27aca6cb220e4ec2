// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ilac/config.hpp"

namespace ilac {

// One CSV row. ue is 1-based; 0 marks a sum over UEs.
struct ResultRow {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string scheme;
  int ue = 0;
  double kappa = 0.0;
  std::string sweep;
  double sweep_value = 0.0;
  std::string metric;
  double value = 0.0;
  double stderr_ = 0.0;
  long count = 0;
};

struct RunRequest {
  std::string experiment;
  std::uint64_t seed = 1;
  int runs = 0;  // 0: use the config value
  int workers = 1;
};

const std::vector<std::string>& experiment_names();

std::vector<ResultRow> run_experiment(const ScenarioConfig& cfg, const RunRequest& req);

std::string csv_header();
std::string format_csv(const std::vector<ResultRow>& rows);
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);

// Mean and standard error of the mean.
std::pair<double, double> mean_stderr(const std::vector<double>& x);

}  // namespace ilac
