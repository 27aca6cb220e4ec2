// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ilac/channel.hpp"

namespace ilac {

enum class RisScheme { random, prior, phase1, oracle, punctual_phase1, punctual_prior };

std::string to_string(RisScheme s);
RisScheme parse_scheme(const std::string& s);
// Whether the ensemble keeps the position covariance (false: collapse to p_hat).
bool scheme_uses_uncertainty(RisScheme s);

struct EnsembleSample {
  std::vector<Vec3> positions;       // per UE
  std::vector<std::vector<Mat>> nlos;  // [ue][ris], N_U x P
  std::vector<Mat> direct;           // [ue], N_U x N_B
};

struct UncertaintyEnsemble {
  std::vector<EnsembleSample> samples;
  int size() const { return static_cast<int>(samples.size()); }
};

// n_pos position draws, each paired with n_nlos fading draws.
UncertaintyEnsemble build_ensemble(const Scenario& sc, const std::vector<Vec3>& p_hat,
                                   const std::vector<Mat3>& cov, int n_pos, int n_nlos, Rng& rng);

std::vector<RisProfile> random_profiles(const Scenario& sc, Rng& rng);

struct RisOptOptions {
  int max_iterations = 50;
  double rel_tol = 1e-4;
  int workers = 1;
  // Per-sample precoders [sample][ue] to start from instead of maximum ratio.
  const std::vector<std::vector<Mat>>* warm_precoders = nullptr;
};

struct RisOptResult {
  std::vector<RisProfile> profiles;
  std::vector<double> objective_trace;  // sample-average weighted MSE per outer iteration
  std::vector<double> step_trace;       // same, after every block update
  std::vector<std::vector<Mat>> precoders;  // [sample][ue]
  double average_sum_rate = 0.0;            // with the last per-sample precoders
  bool converged = false;
  int iterations = 0;
};

// Channel of one UE for one ensemble sample and given profiles (N_U x N_B).
Mat ensemble_channel(const ChannelModel& model, const EnsembleSample& s,
                     const std::vector<RisProfile>& profiles, int ue);

RisOptResult optimize_profiles(const ChannelModel& model, const UncertaintyEnsemble& ensemble,
                               const std::vector<RisProfile>& init,
                               const std::vector<double>& budgets, const RisOptOptions& opts = {});

}  // namespace ilac
