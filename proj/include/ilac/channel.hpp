// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "ilac/random.hpp"
#include "ilac/scenario.hpp"

namespace ilac {

using RisProfile = Vec;  // unit-modulus reflection coefficients

struct ChannelStats {
  Vec mean;
  Mat covariance;
};

// Rank-one BS->RIS link: gain * a_ris * a_bs^T.
struct BsRisLink {
  cd gain;
  Vec a_bs;
  Vec a_ris;  // response toward the BS, in the RIS frame
  AnglePair aod_bs;
  AnglePair aoa_ris;
  double range = 0.0;

  Mat matrix() const { return gain * a_ris * a_bs.transpose(); }
};

// Rician RIS->UE link. LOS part: los_gain * a_ue * a_ris^T.
struct RisUeLink {
  cd los_gain;
  double rho = 0.0;
  double kappa = 0.0;
  double nlos_variance = 0.0;
  Vec a_ris;  // departure toward the UE, RIS frame
  Vec a_ue;   // arrival from the RIS, UE frame
  AnglePair aod_ris;
  AnglePair aoa_ue;
  double range = 0.0;

  Mat los_matrix() const { return los_gain * a_ue * a_ris.transpose(); }
};

BsRisLink bs_ris_link(const Pose& bs, const ArrayLayout& bs_layout, const Pose& ris,
                      const ArrayLayout& ris_layout, const RfParams& rf);
BsRisLink bs_ris_link(const Scenario& sc, int k);

RisUeLink ris_ue_link(const Pose& ris, const ArrayLayout& ris_layout, const Pose& ue,
                      const ArrayLayout& ue_layout, double kappa, const RfParams& rf);
RisUeLink ris_ue_link(const Scenario& sc, int k, int i, const Vec3& ue_position);

Mat sample_nlos(Eigen::Index rows, Eigen::Index cols, double variance, Rng& rng);

Mat cascaded_channel(const Mat& bs_ris, const Mat& ris_ue, const RisProfile& b);

ChannelStats cascaded_stats(const Mat& bs_ris, const Mat& ris_ue_los, const RisProfile& b,
                            double nlos_variance);

// Cached per-RIS BS links for a scenario; positions of UEs vary.
class ChannelModel {
 public:
  explicit ChannelModel(const Scenario& sc);

  const Scenario& scenario() const { return *sc_; }
  const BsRisLink& bs_link(int k) const { return bs_[k]; }
  RisUeLink ue_link(int k, int i, const Vec3& position) const {
    return ris_ue_link(*sc_, k, i, position);
  }

  ChannelStats composed_stats(const std::vector<RisProfile>& profiles, int i,
                              const Vec3& position) const;

  // One realization of the UE-i channel (N_U x N_B) at a position.
  Mat sample_channel(const std::vector<RisProfile>& profiles, int i, const Vec3& position,
                     Rng& rng) const;

 private:
  const Scenario* sc_;
  std::vector<BsRisLink> bs_;
};

ChannelStats composed_stats_at_position(const Scenario& sc,
                                        const std::vector<RisProfile>& profiles, int i,
                                        const Vec3& position);

// Position-marginalized statistics by Monte Carlo over N(p_hat, cov).
ChannelStats marginal_stats(const Scenario& sc, const std::vector<RisProfile>& profiles, int i,
                            const Vec3& p_hat, const Mat3& cov, int n_samples, Rng& rng,
                            int workers = 1);

}  // namespace ilac
