// SPDX-License-Identifier: Apache-2.0
#include "ilac/scenario.hpp"

#include <cmath>
#include <string>

namespace ilac {

void RfParams::validate() const {
  if (!(wavelength > 0.0)) throw InvalidArgument("rf.wavelength must be positive");
  if (!(tx_gain > 0.0 && rx_gain > 0.0 && cell_gain > 0.0))
    throw InvalidArgument("rf gains must be positive");
  if (!(pattern_q > 0.0)) throw InvalidArgument("rf.pattern_q must be positive");
  if (!(pathloss_alpha >= 2.0)) throw InvalidArgument("rf.pathloss_alpha must be >= 2");
  if (!(noise_variance > 0.0)) throw InvalidArgument("rf.noise_variance must be positive");
}

double noise_variance_watts(double noise_figure_db, double density_dbm_hz, double bandwidth_hz) {
  return std::pow(10.0, (density_dbm_hz + noise_figure_db - 30.0) / 10.0) * bandwidth_hz;
}

void Scenario::validate() const {
  rf.validate();
  bs.validate(1e-9);
  for (int k = 0; k < n_ris(); ++k) ris[k].pose.validate(1e-9);
  for (int i = 0; i < n_ue(); ++i) {
    ue[i].pose.validate(1e-9);
    if (static_cast<int>(ue[i].kappa.size()) != n_ris())
      throw InvalidArgument("ue " + std::to_string(i) + ": one Rician factor per RIS required");
    for (double k : ue[i].kappa)
      if (!(k >= 0.0)) throw InvalidArgument("Rician factor must be non-negative");
    if (!(ue[i].direct_nlos_variance >= 0.0))
      throw InvalidArgument("direct-link variance must be non-negative");
    if (!(ue[i].power_budget > 0.0)) throw InvalidArgument("per-UE power budget must be positive");
  }
}

}  // namespace ilac
