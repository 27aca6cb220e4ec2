// SPDX-License-Identifier: Apache-2.0
#include "ilac/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "ilac/kernels.hpp"

namespace ilac {

namespace {

struct SchemeCase {
  RisScheme scheme;
  int pilots = 0;  // phase-1 pilots, 0 when unused

  std::string label() const {
    return pilots > 0 ? to_string(scheme) + "(" + std::to_string(pilots) + ")" : to_string(scheme);
  }
};

Scenario with_kappa(Scenario sc, double kappa) {
  for (auto& u : sc.ue)
    for (auto& k : u.kappa) k = kappa;
  return sc;
}

// samples[case][ue][run], plus one extra column per case for a second index.
using Samples = std::vector<std::vector<std::vector<double>>>;

Samples make_samples(std::size_t cases, int n_ue, int runs) {
  return Samples(cases, std::vector<std::vector<double>>(n_ue, std::vector<double>(runs, 0.0)));
}

// Parallel over runs; the inner optimizer then stays serial.
PipelineOptions run_level(const ScenarioConfig& cfg) { return cfg.pipeline(1); }

void add_stat_rows(std::vector<ResultRow>& rows, const ResultRow& proto,
                   const std::vector<std::vector<double>>& per_ue) {
  const int n = static_cast<int>(per_ue.size());
  std::vector<double> sum(per_ue[0].size(), 0.0);
  for (int i = 0; i < n; ++i) {
    ResultRow r = proto;
    r.ue = i + 1;
    auto [m, s] = mean_stderr(per_ue[i]);
    r.value = m;
    r.stderr_ = s;
    r.count = static_cast<long>(per_ue[i].size());
    rows.push_back(r);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += per_ue[i][k];
  }
  ResultRow r = proto;
  r.ue = 0;
  auto [m, s] = mean_stderr(sum);
  r.value = m;
  r.stderr_ = s;
  r.count = static_cast<long>(sum.size());
  rows.push_back(r);
}

std::vector<ResultRow> peb_sweep(const ScenarioConfig& cfg, const RunRequest& req, int runs) {
  const auto& ex = cfg.experiments;
  const Scenario base = cfg.build_scenario();
  const PipelineOptions opt = run_level(cfg);
  int pool = opt.phase1_pool_slots;
  for (int t : ex.peb_pilots) pool = std::max(pool, t);
  std::vector<ResultRow> rows;
  for (double kappa : ex.kappas) {
    const Scenario sc = with_kappa(base, kappa);
    const ChannelModel model(sc);
    const std::size_t nt = ex.peb_pilots.size();
    Samples peb = make_samples(nt, sc.n_ue(), runs);
    std::vector<std::vector<int>> failed(nt, std::vector<int>(runs, 0));
    kernels::for_each_index(runs, req.workers, [&](int run) {
      Rng prng = run_stream(req.seed, run, Stream::pilots);
      Phase1Pilots all = make_phase1_pilots(sc, pool, prng);
      for (std::size_t t = 0; t < nt; ++t) {
        Phase1Pilots p = all.prefix(ex.peb_pilots[t]);
        for (int i = 0; i < sc.n_ue(); ++i) {
          try {
            peb[t][i][run] = localize_bound(model, p, i, sc.ue[i].pose.position).peb;
          } catch (const Unidentifiable&) {
            peb[t][i][run] = std::sqrt(opt.prior_cov.trace());
            failed[t][run] = 1;
          }
        }
      }
    });
    for (std::size_t t = 0; t < nt; ++t) {
      ResultRow proto{"peb-sweep", req.seed, "phase1", 0, kappa, "phase1_pilots",
                      static_cast<double>(ex.peb_pilots[t]), "peb_m", 0, 0, 0};
      for (int i = 0; i < sc.n_ue(); ++i) {
        ResultRow r = proto;
        r.ue = i + 1;
        auto [m, s] = mean_stderr(peb[t][i]);
        r.value = m;
        r.stderr_ = s;
        r.count = runs;
        rows.push_back(r);
      }
      ResultRow f = proto;
      f.metric = "unidentifiable_runs";
      for (int x : failed[t]) f.value += x;
      f.count = runs;
      rows.push_back(f);
    }
  }
  return rows;
}

std::vector<SchemeCase> static_cases(const ExperimentSettings& ex) {
  std::vector<SchemeCase> c{{RisScheme::random, 0}, {RisScheme::prior, 0}};
  for (int t : ex.scheme_pilots) c.push_back({RisScheme::phase1, t});
  c.push_back({RisScheme::oracle, 0});
  return c;
}

Samples static_rates(const ScenarioConfig& cfg, const RunRequest& req, int runs,
                     const std::vector<SchemeCase>& cases) {
  const Scenario sc = cfg.build_scenario();
  const ChannelModel model(sc);
  const PipelineOptions opt = run_level(cfg);
  Samples rate = make_samples(cases.size(), sc.n_ue(), runs);
  kernels::for_each_index(runs, req.workers, [&](int run) {
    const std::vector<Vec3> truth = true_positions(sc);
    for (std::size_t c = 0; c < cases.size(); ++c) {
      LocationKnowledge loc =
          acquire_location(model, cases[c].scheme, cases[c].pilots, opt, req.seed, run);
      auto prof = configure_ris(model, cases[c].scheme, loc, opt, req.seed, run);
      Rng ev = run_stream(req.seed, run, Stream::evaluation);
      auto r = evaluate_perfect(model, prof, truth, opt, ev);
      for (int i = 0; i < sc.n_ue(); ++i) rate[c][i][run] = r[i];
    }
  });
  return rate;
}

std::vector<ResultRow> ris_schemes(const ScenarioConfig& cfg, const RunRequest& req, int runs) {
  auto cases = static_cases(cfg.experiments);
  Samples rate = static_rates(cfg, req, runs, cases);
  std::vector<ResultRow> rows;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    ResultRow proto{"ris-schemes", req.seed, cases[c].label(), 0, 0.0, "phase1_pilots",
                    static_cast<double>(cases[c].pilots), "rate_bps_hz", 0, 0, 0};
    add_stat_rows(rows, proto, rate[c]);
  }
  return rows;
}

std::vector<ResultRow> rate_cdf(const ScenarioConfig& cfg, const RunRequest& req, int runs) {
  auto cases = static_cases(cfg.experiments);
  Samples rate = static_rates(cfg, req, runs, cases);
  const double p = cfg.experiments.outage_probability;
  std::vector<ResultRow> rows;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    for (std::size_t i = 0; i < rate[c].size(); ++i) {
      ResultRow r{"rate-cdf", req.seed, cases[c].label(), static_cast<int>(i) + 1, 0.0,
                  "outage_probability", p, "outage_rate_bps_hz", 0, 0, runs};
      r.value = outage_rate(rate[c][i], p);
      rows.push_back(r);
      for (const auto& [x, f] : empirical_cdf(rate[c][i])) {
        ResultRow q{"rate-cdf", req.seed, cases[c].label(), static_cast<int>(i) + 1, 0.0,
                    "rate_bps_hz", x, "cdf", f, 0, runs};
        rows.push_back(q);
      }
    }
  }
  return rows;
}

std::vector<ResultRow> mobility(const ScenarioConfig& cfg, const RunRequest& req, int runs) {
  const auto& ex = cfg.experiments;
  const Scenario sc = cfg.build_scenario();
  const ChannelModel model(sc);
  const PipelineOptions opt = run_level(cfg);
  const double tc = cfg.coherence_time_s;
  std::vector<int> steps;
  for (double t : ex.mobility_times) steps.push_back(static_cast<int>(std::lround(t / tc)));
  const int max_steps = *std::max_element(steps.begin(), steps.end());
  const std::vector<SchemeCase> cases{{RisScheme::phase1, ex.mobility_pilots},
                                      {RisScheme::prior, 0},
                                      {RisScheme::punctual_phase1, ex.mobility_pilots},
                                      {RisScheme::punctual_prior, 0}};
  const std::size_t nt = steps.size();
  // [case * nt + t][ue][run]
  Samples rate = make_samples(cases.size() * nt, sc.n_ue(), runs);
  kernels::for_each_index(runs, req.workers, [&](int run) {
    std::vector<std::vector<Vec3>> traj;
    for (int i = 0; i < sc.n_ue(); ++i) {
      Rng tr = run_stream(req.seed, run, Stream::trajectory, static_cast<std::uint64_t>(i));
      traj.push_back(random_walk(sc.ue[i].pose.position, opt.step_cov, max_steps, tr));
    }
    for (std::size_t c = 0; c < cases.size(); ++c) {
      LocationKnowledge loc =
          acquire_location(model, cases[c].scheme, cases[c].pilots, opt, req.seed, run);
      auto prof = configure_ris(model, cases[c].scheme, loc, opt, req.seed, run);
      for (std::size_t t = 0; t < nt; ++t) {
        std::vector<Vec3> pos;
        for (int i = 0; i < sc.n_ue(); ++i) pos.push_back(traj[i][steps[t]]);
        Rng ev = run_stream(req.seed, run, Stream::evaluation, t);
        auto r = evaluate_perfect(model, prof, pos, opt, ev);
        for (int i = 0; i < sc.n_ue(); ++i) rate[c * nt + t][i][run] = r[i];
      }
    }
  });
  std::vector<ResultRow> rows;
  for (std::size_t c = 0; c < cases.size(); ++c)
    for (std::size_t t = 0; t < nt; ++t) {
      ResultRow proto{"mobility", req.seed, cases[c].label(), 0, 0.0, "time_s",
                      ex.mobility_times[t], "rate_bps_hz", 0, 0, 0};
      add_stat_rows(rows, proto, rate[c * nt + t]);
    }
  return rows;
}

std::vector<ResultRow> chest_nmse(const ScenarioConfig& cfg, const RunRequest& req, int runs) {
  const auto& ex = cfg.experiments;
  const Scenario sc = cfg.build_scenario();
  const ChannelModel model(sc);
  const PipelineOptions opt = run_level(cfg);
  const std::vector<SchemeCase> cases{{RisScheme::phase1, ex.chest_phase1_pilots},
                                      {RisScheme::prior, 0}};
  const std::size_t nt = ex.chest_phase2_pilots.size();
  Samples analytic = make_samples(cases.size() * nt, sc.n_ue(), runs);
  Samples empirical = make_samples(cases.size() * nt, sc.n_ue(), runs);
  kernels::for_each_index(runs, req.workers, [&](int run) {
    const std::vector<Vec3> truth = true_positions(sc);
    for (std::size_t c = 0; c < cases.size(); ++c) {
      LocationKnowledge loc =
          acquire_location(model, cases[c].scheme, cases[c].pilots, opt, req.seed, run);
      auto prof = configure_ris(model, cases[c].scheme, loc, opt, req.seed, run);
      PhaseTwoContext ctx = prepare_phase2(model, prof, loc, truth, opt, req.seed, run);
      for (std::size_t t = 0; t < nt; ++t) {
        Rng noise = run_stream(req.seed, run, Stream::phase2_noise, t);
        for (int i = 0; i < sc.n_ue(); ++i) {
          const int nu = sc.ue[i].layout.size();
          Phase2Pilots pl = design_pilots(sc.n_bs(), ex.chest_phase2_pilots[t], sc.total_power, nu);
          Vec h = vec(ctx.truth[i]);
          Vec y = observe(pl, h, sc.rf.noise_variance, noise);
          EstimationResult est = lmmse_estimate(pl, y, ctx.stats[i], sc.rf.noise_variance);
          analytic[c * nt + t][i][run] = nmse(est.error_cov, h);
          empirical[c * nt + t][i][run] = (est.estimate - h).squaredNorm() / h.squaredNorm();
        }
      }
    }
  });
  std::vector<ResultRow> rows;
  for (std::size_t c = 0; c < cases.size(); ++c)
    for (std::size_t t = 0; t < nt; ++t)
      for (int i = 0; i < sc.n_ue(); ++i) {
        for (int which = 0; which < 2; ++which) {
          const auto& x = which == 0 ? analytic[c * nt + t][i] : empirical[c * nt + t][i];
          auto [m, s] = mean_stderr(x);
          rows.push_back({"chest-nmse", req.seed, cases[c].label(), i + 1, 0.0, "phase2_pilots",
                          static_cast<double>(ex.chest_phase2_pilots[t]),
                          which == 0 ? "nmse" : "nmse_empirical", m, s, runs});
        }
      }
  return rows;
}

std::vector<ResultRow> effective_rate(const ScenarioConfig& cfg, const RunRequest& req,
                                      int runs) {
  const auto& ex = cfg.experiments;
  const Scenario base = cfg.build_scenario();
  const PipelineOptions opt = run_level(cfg);
  const std::vector<SchemeCase> cases{{RisScheme::phase1, ex.effective_phase1_pilots},
                                      {RisScheme::prior, 0}};
  const std::size_t nt = ex.effective_phase2_pilots.size();
  FrameTiming timing = cfg.timing();
  std::vector<ResultRow> rows;
  for (double kappa : ex.effective_kappas) {
    const Scenario sc = with_kappa(base, kappa);
    const ChannelModel model(sc);
    // per case: nt estimated entries followed by one perfect-CSI entry
    Samples rate = make_samples(cases.size() * (nt + 1), sc.n_ue(), runs);
    kernels::for_each_index(runs, req.workers, [&](int run) {
      const std::vector<Vec3> truth = true_positions(sc);
      for (std::size_t c = 0; c < cases.size(); ++c) {
        LocationKnowledge loc =
            acquire_location(model, cases[c].scheme, cases[c].pilots, opt, req.seed, run);
        auto prof = configure_ris(model, cases[c].scheme, loc, opt, req.seed, run);
        PhaseTwoContext ctx = prepare_phase2(model, prof, loc, truth, opt, req.seed, run);
        for (std::size_t t = 0; t < nt; ++t) {
          Rng noise = run_stream(req.seed, run, Stream::phase2_noise, t);
          auto ev = evaluate_estimated(model, ctx, ex.effective_phase2_pilots[t], opt, noise);
          for (int i = 0; i < sc.n_ue(); ++i) rate[c * (nt + 1) + t][i][run] = ev.rates[i];
        }
        std::vector<UeCsi> csi;
        for (const Mat& h : ctx.truth) csi.push_back(perfect_csi(h));
        auto ps = wmmse_optimize(csi, per_ue_budgets(sc), sc.rf.noise_variance, opt.wmmse);
        for (int i = 0; i < sc.n_ue(); ++i) rate[c * (nt + 1) + nt][i][run] = ps.ue_rates[i];
      }
    });
    for (std::size_t c = 0; c < cases.size(); ++c) {
      for (std::size_t t = 0; t < nt; ++t) {
        timing.phase2_slots = ex.effective_phase2_pilots[t];
        const double eta = timing.eta();
        auto scaled = rate[c * (nt + 1) + t];
        for (auto& v : scaled)
          for (auto& x : v) x *= eta;
        ResultRow proto{"effective-rate", req.seed, cases[c].label(), 0, kappa, "phase2_pilots",
                        static_cast<double>(ex.effective_phase2_pilots[t]), "rate_bps_hz",
                        0, 0, 0};
        add_stat_rows(rows, proto, rate[c * (nt + 1) + t]);
        proto.metric = "effective_rate_bps_hz";
        add_stat_rows(rows, proto, scaled);
        auto perfect = rate[c * (nt + 1) + nt];
        for (auto& v : perfect)
          for (auto& x : v) x *= eta;
        proto.metric = "perfect_csi_effective_rate_bps_hz";
        add_stat_rows(rows, proto, perfect);
      }
    }
  }
  return rows;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::pair<double, double> mean_stderr(const std::vector<double>& x) {
  if (x.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  if (x.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  double var = ss / static_cast<double>(x.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(x.size()))};
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"peb-sweep", "ris-schemes", "rate-cdf",
                                              "mobility",  "chest-nmse",  "effective-rate"};
  return names;
}

std::vector<ResultRow> run_experiment(const ScenarioConfig& cfg, const RunRequest& req) {
  const int runs = req.runs > 0 ? req.runs : cfg.experiments.runs;
  if (req.workers < 1) throw InvalidArgument("workers must be >= 1");
  const std::string& e = req.experiment;
  if (e == "peb-sweep") return peb_sweep(cfg, req, runs);
  if (e == "ris-schemes") return ris_schemes(cfg, req, runs);
  if (e == "rate-cdf") return rate_cdf(cfg, req, runs);
  if (e == "mobility") return mobility(cfg, req, runs);
  if (e == "chest-nmse") return chest_nmse(cfg, req, runs);
  if (e == "effective-rate") return effective_rate(cfg, req, runs);
  throw InvalidArgument("unknown experiment: " + e);
}

std::string csv_header() {
  return "experiment,seed,scheme,ue,kappa,sweep,sweep_value,metric,value,stderr,count\n";
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header();
  for (const auto& r : rows) {
    out += r.experiment + "," + std::to_string(r.seed) + "," + r.scheme + "," +
           (r.ue == 0 ? std::string("sum") : std::to_string(r.ue)) + "," + fmt17(r.kappa) + "," +
           r.sweep + "," + fmt17(r.sweep_value) + "," + r.metric + "," + fmt17(r.value) + "," +
           fmt17(r.stderr_) + "," + std::to_string(r.count) + "\n";
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write output file: " + path);
  out << format_csv(rows);
  if (!out) throw InvalidArgument("failed writing output file: " + path);
}

}  // namespace ilac
