// SPDX-License-Identifier: Apache-2.0
#include "ilac/harness.hpp"

#include <algorithm>
#include <cmath>

namespace ilac {

int FrameTiming::symbols_per_coherence() const {
  return static_cast<int>(std::lround(coherence_time * bandwidth));
}

int FrameTiming::n_coherence() const {
  double t_p1 = phase1_slots / bandwidth;
  return static_cast<int>(std::floor((location_interval - t_p1) / coherence_time + 1e-9));
}

double FrameTiming::eta() const {
  double n = symbols_per_coherence();
  return (n - phase2_slots) / n;
}

void FrameTiming::validate() const {
  if (!(coherence_time > 0.0 && bandwidth > 0.0 && location_interval >= coherence_time))
    throw InvalidArgument("frame timing must be positive with T_L >= T_C");
  if (phase1_slots <= 0 || phase1_slots % 2 != 0)
    throw InvalidArgument("phase-1 pilot count must be positive and even");
  if (phase2_slots < 0 || phase2_slots > symbols_per_coherence())
    throw InvalidArgument("phase-2 pilots must fit in one coherence interval");
}

std::vector<Vec3> random_walk(const Vec3& p0, const Mat3& step_cov, int n_steps, Rng& rng) {
  std::vector<Vec3> traj{p0};
  traj.reserve(n_steps + 1);
  for (int t = 0; t < n_steps; ++t)
    traj.push_back(sample_gaussian3(traj.back(), step_cov, rng));
  return traj;
}

double outage_rate(std::vector<double> samples, double p_out) {
  if (samples.empty()) throw InvalidArgument("outage_rate: no samples");
  if (!(p_out > 0.0 && p_out < 1.0)) throw InvalidArgument("outage probability must be in (0,1)");
  std::sort(samples.begin(), samples.end());
  auto n = static_cast<double>(samples.size());
  long idx = static_cast<long>(std::ceil(p_out * n)) - 1;
  idx = std::clamp(idx, 0L, static_cast<long>(samples.size()) - 1);
  return samples[idx];
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    out.emplace_back(samples[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

Rng run_stream(std::uint64_t seed, int run, Stream s, std::uint64_t sub) {
  return Rng(derive_seed(seed, {static_cast<std::uint64_t>(run), static_cast<std::uint64_t>(s), sub}));
}

std::vector<Vec3> true_positions(const Scenario& sc) {
  std::vector<Vec3> p;
  for (const auto& u : sc.ue) p.push_back(u.pose.position);
  return p;
}

std::vector<double> per_ue_budgets(const Scenario& sc) {
  std::vector<double> b;
  for (const auto& u : sc.ue) b.push_back(u.power_budget);
  return b;
}

LocationKnowledge acquire_location(const ChannelModel& model, RisScheme scheme, int phase1_slots,
                                   const PipelineOptions& opt, std::uint64_t seed, int run) {
  const Scenario& sc = model.scenario();
  const int n = sc.n_ue();
  LocationKnowledge loc;
  loc.p_hat = true_positions(sc);
  loc.estimate_cov.assign(n, Mat3::Zero());
  loc.peb.assign(n, 0.0);
  if (scheme == RisScheme::prior || scheme == RisScheme::punctual_prior) {
    loc.estimate_cov.assign(n, opt.prior_cov);
    loc.peb.assign(n, std::sqrt(opt.prior_cov.trace()));
  } else if (scheme == RisScheme::phase1 || scheme == RisScheme::punctual_phase1) {
    Rng prng = run_stream(seed, run, Stream::pilots);
    Phase1Pilots pool = make_phase1_pilots(sc, std::max(opt.phase1_pool_slots, phase1_slots), prng);
    Phase1Pilots pilots = pool.prefix(phase1_slots);
    for (int i = 0; i < n; ++i) {
      try {
        FimReport r = localize_bound(model, pilots, i, sc.ue[i].pose.position);
        loc.estimate_cov[i] = r.sigma_pos;
        loc.peb[i] = r.peb;
      } catch (const Unidentifiable&) {
        loc.estimate_cov[i] = opt.prior_cov;
        loc.peb[i] = std::sqrt(opt.prior_cov.trace());
        loc.fallback_to_prior = true;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    Rng r = run_stream(seed, run, Stream::position_estimate, static_cast<std::uint64_t>(i));
    loc.p_hat[i] = sample_position_estimate(sc.ue[i].pose.position, loc.estimate_cov[i], r);
  }
  loc.ensemble_cov = scheme_uses_uncertainty(scheme) ? loc.estimate_cov
                                                     : std::vector<Mat3>(n, Mat3::Zero());
  return loc;
}

std::vector<RisProfile> configure_ris(const ChannelModel& model, RisScheme scheme,
                                      const LocationKnowledge& loc, const PipelineOptions& opt,
                                      std::uint64_t seed, int run) {
  const Scenario& sc = model.scenario();
  if (scheme == RisScheme::random) {
    Rng r = run_stream(seed, run, Stream::random_profile);
    return random_profiles(sc, r);
  }
  bool spread = false;
  for (const Mat3& c : loc.ensemble_cov) spread = spread || !c.isZero(0.0);
  int n_pos = spread ? opt.ensemble_positions : 1;
  int n_nlos = spread ? opt.ensemble_nlos : opt.ensemble_positions * opt.ensemble_nlos;
  Rng er = run_stream(seed, run, Stream::ensemble);
  UncertaintyEnsemble ens = build_ensemble(sc, loc.p_hat, loc.ensemble_cov, n_pos, n_nlos, er);
  Rng ir = run_stream(seed, run, Stream::ris_init);
  std::vector<RisProfile> init = random_profiles(sc, ir);
  return optimize_profiles(model, ens, init, per_ue_budgets(sc), opt.ris).profiles;
}

std::vector<double> evaluate_perfect(const ChannelModel& model,
                                     const std::vector<RisProfile>& profiles,
                                     const std::vector<Vec3>& positions,
                                     const PipelineOptions& opt, Rng& rng) {
  const Scenario& sc = model.scenario();
  std::vector<UeCsi> csi;
  for (int i = 0; i < sc.n_ue(); ++i)
    csi.push_back(perfect_csi(model.sample_channel(profiles, i, positions[i], rng)));
  PrecoderSet ps = wmmse_optimize(csi, per_ue_budgets(sc), sc.rf.noise_variance, opt.wmmse);
  return ps.ue_rates;
}

PhaseTwoContext prepare_phase2(const ChannelModel& model, const std::vector<RisProfile>& profiles,
                               const LocationKnowledge& loc, const std::vector<Vec3>& positions,
                               const PipelineOptions& opt, std::uint64_t seed, int run) {
  const Scenario& sc = model.scenario();
  PhaseTwoContext ctx;
  for (int i = 0; i < sc.n_ue(); ++i) {
    auto sub = static_cast<std::uint64_t>(i);
    Rng mr = run_stream(seed, run, Stream::marginal, sub);
    ctx.stats.push_back(marginal_stats(sc, profiles, i, loc.p_hat[i], loc.ensemble_cov[i],
                                       opt.marginal_samples, mr, opt.ris.workers));
    Rng er = run_stream(seed, run, Stream::evaluation, sub);
    ctx.truth.push_back(model.sample_channel(profiles, i, positions[i], er));
  }
  return ctx;
}

EstimatedEvaluation evaluate_estimated(const ChannelModel& model, const PhaseTwoContext& ctx,
                                       int phase2_slots, const PipelineOptions& opt, Rng& noise) {
  const Scenario& sc = model.scenario();
  const double s2 = sc.rf.noise_variance;
  std::vector<UeCsi> csi;
  EstimatedEvaluation out;
  for (int i = 0; i < sc.n_ue(); ++i) {
    const int nu = sc.ue[i].layout.size();
    Phase2Pilots pilots = design_pilots(sc.n_bs(), phase2_slots, sc.total_power, nu);
    Vec h = vec(ctx.truth[i]);
    Vec y = observe(pilots, h, s2, noise);
    EstimationResult est = lmmse_estimate(pilots, y, ctx.stats[i], s2);
    UeCsi c;
    c.h = unvec(est.estimate, nu, sc.n_bs());
    c.error_cov = est.error_cov;
    c.second_moment = ctx.stats[i].covariance + ctx.stats[i].mean * ctx.stats[i].mean.adjoint();
    csi.push_back(std::move(c));
    out.nmse.push_back(nmse(est.error_cov, h));
  }
  PrecoderSet ps = wmmse_optimize(csi, per_ue_budgets(sc), s2, opt.wmmse);
  out.rates = ps.ue_rates;
  return out;
}

}  // namespace ilac
