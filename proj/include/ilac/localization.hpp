// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <vector>

#include "ilac/channel.hpp"

namespace ilac {

struct Unidentifiable : std::runtime_error {
  Unidentifiable(const std::string& what, int null_dim)
      : std::runtime_error(what), null_dimension(null_dim) {}
  int null_dimension;
};

struct Phase1Pilots {
  Vec symbol;                                  // x, constant over the slots
  std::vector<std::vector<RisProfile>> slots;  // slots[t][k]; slot 2m+1 = -slot 2m

  int n_slots() const { return static_cast<int>(slots.size()); }
  int n_pairs() const { return n_slots() / 2; }
  // First n slots (n even). Nested by construction.
  Phase1Pilots prefix(int n) const;
  // Same configurations repeated back to back.
  Phase1Pilots repeated(int times) const;
};

// Uniform power across BS antennas; pair phases i.i.d. uniform.
Phase1Pilots make_phase1_pilots(const Scenario& sc, int n_slots, Rng& rng);

std::vector<Vec> difference_observations(const std::vector<Vec>& y);

double effective_noise_variance(const ChannelModel& model, const Vec& x, int ue,
                                const Vec3& position);

// Channel parameters of one UE: AOD at each RIS, AOA at the UE, complex LOS gain.
struct ChannelParams {
  std::vector<AnglePair> aod;
  std::vector<AnglePair> aoa;
  std::vector<cd> gain;

  RVec pack() const;  // [theta_el, theta_az]*K, [phi_el, phi_az]*K, [re, im]*K
  static ChannelParams unpack(const RVec& eta, int n_ris);
};

ChannelParams true_channel_params(const ChannelModel& model, int ue, const Vec3& position);

// Noise-free differenced means, one column per pair (N_U x T/2).
Mat phase1_means(const ChannelModel& model, const Phase1Pilots& pilots, int ue,
                 const ChannelParams& params);

// d mu_t / d eta^T for each pair (N_U x 6K).
std::vector<Mat> phase1_mean_gradients(const ChannelModel& model, const Phase1Pilots& pilots,
                                       int ue, const ChannelParams& params);

RMat fim_channel_params(const ChannelModel& model, const Phase1Pilots& pilots, int ue,
                        const Vec3& position);
RMat fim_channel_params(const ChannelModel& model, const Phase1Pilots& pilots, int ue,
                        const Vec3& position, double sigma2);

// Jacobian of eta with respect to zeta = [p, phi, gain] (6K x (4K+3)).
RMat position_jacobian(const ChannelModel& model, int ue, const Vec3& position);
RMat fim_position_params(const RMat& j_eta, const ChannelModel& model, int ue,
                         const Vec3& position);

struct PositionError {
  Mat3 sigma = Mat3::Zero();
  double peb = 0.0;
};

// planar: z is known, so the z row and column of J are dropped before inversion.
PositionError position_error_covariance(const RMat& j_zeta, bool planar);

struct FimReport {
  RMat j_eta;
  RMat j_zeta;
  Mat3 sigma_pos = Mat3::Zero();
  double peb = 0.0;
};

FimReport localize_bound(const ChannelModel& model, const Phase1Pilots& pilots, int ue,
                         const Vec3& position);

Vec3 sample_position_estimate(const Vec3& true_position, const Mat3& sigma, Rng& rng);

}  // namespace ilac
