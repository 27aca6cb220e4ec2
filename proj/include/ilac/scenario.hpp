// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "ilac/geometry.hpp"

namespace ilac {

struct RfParams {
  double carrier_hz = 28e9;
  double wavelength = 0.0;
  double tx_gain = 2.5;
  double rx_gain = 2.5;
  double cell_gain = kPi;
  double pattern_q = 0.57;
  double pathloss_alpha = 2.0;
  double noise_variance = 0.0;  // watts

  void validate() const;
};

double noise_variance_watts(double noise_figure_db, double density_dbm_hz, double bandwidth_hz);

struct RisNode {
  Pose pose;
  ArrayLayout layout{1, 1, 1.0};
};

struct UeNode {
  Pose pose;  // position is the true location
  ArrayLayout layout{1, 1, 1.0};
  std::vector<double> kappa;  // Rician factor of the link from each RIS
  double direct_nlos_variance = 0.0;
  double power_budget = 0.0;  // watts
};

struct Scenario {
  RfParams rf;
  Pose bs;
  ArrayLayout bs_layout{1, 1, 1.0};
  std::vector<RisNode> ris;
  std::vector<UeNode> ue;
  double bandwidth_hz = 120e3;
  double total_power = 1e-3;  // watts
  bool planar = true;         // UE z coordinate is known and fixed

  int n_ris() const { return static_cast<int>(ris.size()); }
  int n_ue() const { return static_cast<int>(ue.size()); }
  int n_bs() const { return bs_layout.size(); }

  void validate() const;
};

}  // namespace ilac
