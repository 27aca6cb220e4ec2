// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ilac/chest.hpp"
#include "ilac/localization.hpp"
#include "ilac/precoder.hpp"
#include "ilac/ris_opt.hpp"

namespace ilac {

struct FrameTiming {
  double location_interval = 1.0;   // T_L, s
  double coherence_time = 1e-3;     // T_C, s
  double bandwidth = 120e3;         // B, Hz
  int phase1_slots = 20;            // T_P1 * B
  int phase2_slots = 12;            // T_P2 * B

  int symbols_per_coherence() const;
  // Coherence intervals following Phase I inside one location interval.
  int n_coherence() const;
  double eta() const;
  void validate() const;
};

std::vector<Vec3> random_walk(const Vec3& p0, const Mat3& step_cov, int n_steps, Rng& rng);

// Lower empirical p-quantile.
double outage_rate(std::vector<double> samples, double p_out);

// (value, cumulative probability) pairs, sorted.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples);

struct PipelineOptions {
  int marginal_samples = 2000;
  int ensemble_positions = 64;
  int ensemble_nlos = 8;
  int phase1_pool_slots = 120;  // pilots are nested prefixes of one sequence
  Mat3 prior_cov = (Mat3() << 2, 0, 0, 0, 2, 0, 0, 0, 0).finished();
  Mat3 step_cov = (Mat3() << 1e-6, 0, 0, 0, 1e-6, 0, 0, 0, 0).finished();
  RisOptOptions ris;
  WmmseOptions wmmse;
};

// Independent random streams of one Monte Carlo run. Streams do not depend on
// the scheme, so schemes compared within a run share their randomness.
enum class Stream : std::uint64_t {
  pilots = 1,
  position_estimate = 2,
  ensemble = 3,
  ris_init = 4,
  evaluation = 5,
  trajectory = 6,
  marginal = 7,
  phase2_noise = 8,
  random_profile = 9,
};

Rng run_stream(std::uint64_t seed, int run, Stream s, std::uint64_t sub = 0);

struct LocationKnowledge {
  std::vector<Vec3> p_hat;
  std::vector<Mat3> estimate_cov;  // covariance of p_hat around the truth
  std::vector<Mat3> ensemble_cov;  // covariance the optimizer marginalizes over
  std::vector<double> peb;
  bool fallback_to_prior = false;
};

LocationKnowledge acquire_location(const ChannelModel& model, RisScheme scheme, int phase1_slots,
                                   const PipelineOptions& opt, std::uint64_t seed, int run);

std::vector<RisProfile> configure_ris(const ChannelModel& model, RisScheme scheme,
                                      const LocationKnowledge& loc, const PipelineOptions& opt,
                                      std::uint64_t seed, int run);

std::vector<double> per_ue_budgets(const Scenario& sc);

// Perfect-CSI rates after WMMSE on one true-channel draw.
std::vector<double> evaluate_perfect(const ChannelModel& model,
                                     const std::vector<RisProfile>& profiles,
                                     const std::vector<Vec3>& positions,
                                     const PipelineOptions& opt, Rng& rng);

struct EstimatedEvaluation {
  std::vector<double> rates;
  std::vector<double> nmse;  // analytic, trace(E) / ||h||^2
};

struct PhaseTwoContext {
  std::vector<ChannelStats> stats;  // per UE
  std::vector<Mat> truth;           // per UE, N_U x N_B
};

PhaseTwoContext prepare_phase2(const ChannelModel& model, const std::vector<RisProfile>& profiles,
                               const LocationKnowledge& loc, const std::vector<Vec3>& positions,
                               const PipelineOptions& opt, std::uint64_t seed, int run);

EstimatedEvaluation evaluate_estimated(const ChannelModel& model, const PhaseTwoContext& ctx,
                                       int phase2_slots, const PipelineOptions& opt, Rng& noise);

std::vector<Vec3> true_positions(const Scenario& sc);

}  // namespace ilac
