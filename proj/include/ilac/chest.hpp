// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "ilac/channel.hpp"

namespace ilac {

struct Phase2Pilots {
  Mat x_p2;    // N_B x T
  Mat lifted;  // (N_U T) x (N_B N_U)

  int n_slots() const { return static_cast<int>(x_p2.cols()); }
};

// DFT columns scaled so that every column carries `power`.
Phase2Pilots design_pilots(int n_bs, int n_slots, double power, int n_ue_antennas);

// y = X h + n with n ~ CN(0, sigma2 I).
Vec observe(const Phase2Pilots& pilots, const Vec& h, double sigma2, Rng& rng);

struct EstimationResult {
  Vec estimate;
  Mat error_cov;
  std::string tag;
};

EstimationResult ml_estimate(const Phase2Pilots& pilots, const Vec& y, double sigma2);

EstimationResult lmmse_estimate(const Phase2Pilots& pilots, const Vec& y,
                                const ChannelStats& stats, double sigma2);

// Error covariance only; does not need an observation.
Mat lmmse_error_covariance(const Phase2Pilots& pilots, const Mat& r, double sigma2);
Mat lmmse_error_simplified(const Phase2Pilots& pilots, const Mat& r, double sigma2);

struct ErrorGap {
  Mat delta;
  double min_eigenvalue = 0.0;
};

ErrorGap error_gap(const Mat& e_ml, const Mat& e_mmse);
Mat error_gap_closed_form(const Phase2Pilots& pilots, const Mat& r, double sigma2);

// Trace of the error covariance over the squared channel norm.
double nmse(const Mat& error_cov, const Vec& h);

}  // namespace ilac
