// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ilac/experiments.hpp"
#include "support.hpp"

using namespace ilac;
using ilac::test::scenario_path;

namespace {

// Small ensembles so a whole experiment runs quickly.
ScenarioConfig quick_config(const std::string& name = "reduced.cfg") {
  ScenarioConfig c = parse_scenario(scenario_path(name));
  c.marginal_samples = 200;
  c.ensemble_positions = 4;
  c.ensemble_nlos = 1;
  c.ris_max_iterations = 5;
  c.wmmse_max_iterations = 30;
  return c;
}

const ResultRow* find(const std::vector<ResultRow>& rows, const std::string& scheme_prefix,
                      int ue, const std::string& metric, double sweep, double kappa = -1.0) {
  for (const auto& r : rows)
    if (r.scheme.rfind(scheme_prefix, 0) == 0 && r.ue == ue && r.metric == metric &&
        r.sweep_value == sweep && (kappa < 0 || r.kappa == kappa))
      return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("frame timing") {
  FrameTiming t;
  CHECK(t.symbols_per_coherence() == 120);
  CHECK(t.eta() == doctest::Approx(108.0 / 120.0).epsilon(1e-15).scale(0));
  // T_L = 1 s, T_P1 = 20 / 120 kHz, T_C = 1 ms
  CHECK(t.n_coherence() == 999);
  t.phase1_slots = 120;
  CHECK(t.n_coherence() == 999);
  t.phase1_slots = 240;
  CHECK(t.n_coherence() == 998);
  t.phase2_slots = 0;
  CHECK(t.eta() == 1.0);
  t.phase2_slots = 120;
  CHECK(t.eta() == 0.0);
  CHECK_NOTHROW(t.validate());
  t.phase2_slots = 121;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t.phase2_slots = 12;
  t.phase1_slots = 7;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
}

TEST_CASE("random walk") {
  Rng rng(1);
  Mat3 cov = Mat3::Zero();
  cov(0, 0) = cov(1, 1) = 1e-2;
  const Vec3 p0(1, 2, 0);
  auto tr = random_walk(p0, cov, 1000, rng);
  CHECK(tr.size() == 1001);
  CHECK(tr.front() == p0);
  for (const auto& p : tr) CHECK(p.z() == 0.0);
  // increments are independent with the step covariance
  double sxx = 0.0;
  for (std::size_t t = 1; t < tr.size(); ++t) sxx += std::pow(tr[t].x() - tr[t - 1].x(), 2);
  CHECK(sxx / 1000 == doctest::Approx(1e-2).epsilon(0.15).scale(0));
  auto still = random_walk(p0, Mat3::Zero(), 5, rng);
  for (const auto& p : still) CHECK(p == p0);
}

TEST_CASE("outage quantile and empirical CDF") {
  std::vector<double> x;
  for (int i = 1; i <= 100; ++i) x.push_back(101 - i);
  CHECK(outage_rate(x, 0.1) == 10.0);
  CHECK(outage_rate(x, 0.01) == 1.0);
  CHECK(outage_rate(x, 0.999) == 100.0);
  CHECK_THROWS_AS(outage_rate({}, 0.1), InvalidArgument);
  CHECK_THROWS_AS(outage_rate(x, 0.0), InvalidArgument);
  Rng rng(4);
  std::vector<double> u(100000);
  for (double& v : u) v = rng.uniform();
  CHECK(std::abs(outage_rate(u, 0.1) - 0.1) <= 0.01);
  CHECK(outage_rate(std::vector<double>(50, 3.5), 0.1) == 3.5);
  auto cdf = empirical_cdf({3.0, 1.0, 2.0, 2.0});
  REQUIRE(cdf.size() == 3);
  CHECK(cdf[0] == std::make_pair(1.0, 0.25));
  CHECK(cdf[1] == std::make_pair(2.0, 0.75));
  CHECK(cdf[2] == std::make_pair(3.0, 1.0));
}

TEST_CASE("mean and standard error") {
  auto [m, s] = mean_stderr({1.0, 2.0, 3.0, 4.0});
  CHECK(m == 2.5);
  CHECK(s == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)).epsilon(1e-14).scale(0));
  auto [m1, s1] = mean_stderr({7.0});
  CHECK(m1 == 7.0);
  CHECK(s1 == 0.0);
}

TEST_CASE("run streams are distinct and reproducible") {
  Rng a = run_stream(7, 0, Stream::pilots);
  Rng b = run_stream(7, 0, Stream::pilots);
  Rng c = run_stream(7, 1, Stream::pilots);
  Rng d = run_stream(7, 0, Stream::ensemble);
  const auto x = a.engine()();
  CHECK(x == b.engine()());
  CHECK(x != c.engine()());
  CHECK(x != d.engine()());
}

TEST_CASE("location knowledge per scheme") {
  ScenarioConfig cfg = quick_config("table1.cfg");
  Scenario sc = cfg.build_scenario();
  ChannelModel model(sc);
  PipelineOptions opt = cfg.pipeline(1);
  auto oracle = acquire_location(model, RisScheme::oracle, 20, opt, 1, 0);
  for (int i = 0; i < sc.n_ue(); ++i) CHECK(oracle.p_hat[i] == sc.ue[i].pose.position);
  auto prior = acquire_location(model, RisScheme::prior, 20, opt, 1, 0);
  auto punctual = acquire_location(model, RisScheme::punctual_prior, 20, opt, 1, 0);
  for (int i = 0; i < sc.n_ue(); ++i) {
    CHECK(prior.p_hat[i] == punctual.p_hat[i]);
    CHECK(prior.ensemble_cov[i] == opt.prior_cov);
    CHECK(punctual.ensemble_cov[i].isZero(0.0));
  }
  auto p1 = acquire_location(model, RisScheme::phase1, 20, opt, 1, 0);
  for (int i = 0; i < sc.n_ue(); ++i) {
    CHECK(p1.peb[i] > 0.0);
    CHECK(p1.peb[i] < prior.peb[i]);
    CHECK(p1.estimate_cov[i](2, 2) == 0.0);
  }
}

TEST_CASE("Phase-I statistics give lower NMSE than the prior at full scale") {
  ScenarioConfig cfg = quick_config("table1.cfg");
  cfg.experiments.chest_phase2_pilots = {8, 16, 32};
  RunRequest req;
  req.experiment = "chest-nmse";
  req.seed = 11;
  req.runs = 2;
  req.workers = 2;
  auto rows = run_experiment(cfg, req);
  for (double t : {8.0, 16.0, 32.0})
    for (int ue : {1, 2}) {
      const ResultRow* p1 = find(rows, "phase1", ue, "nmse", t);
      const ResultRow* pr = find(rows, "prior", ue, "nmse", t);
      REQUIRE(p1);
      REQUIRE(pr);
      CHECK(p1->value < pr->value);
      CHECK(p1->count == 2);
    }
}

TEST_CASE("effective rate is eta times the estimated-CSI rate") {
  ScenarioConfig cfg = quick_config();
  cfg.experiments.effective_phase2_pilots = {4, 12, 60};
  cfg.experiments.effective_kappas = {50};
  RunRequest req;
  req.experiment = "effective-rate";
  req.seed = 3;
  req.runs = 2;
  auto rows = run_experiment(cfg, req);
  FrameTiming timing = cfg.timing();
  for (double t : {4.0, 12.0, 60.0}) {
    timing.phase2_slots = static_cast<int>(t);
    for (int ue : {0, 1, 2}) {
      const ResultRow* r = find(rows, "phase1", ue, "rate_bps_hz", t, 50);
      const ResultRow* e = find(rows, "phase1", ue, "effective_rate_bps_hz", t, 50);
      REQUIRE(r);
      REQUIRE(e);
      CHECK(e->value == doctest::Approx(timing.eta() * r->value).epsilon(1e-14).scale(0));
    }
  }
  // per-UE rows sum to the sum row
  const ResultRow* s = find(rows, "phase1", 0, "rate_bps_hz", 12, 50);
  const ResultRow* a = find(rows, "phase1", 1, "rate_bps_hz", 12, 50);
  const ResultRow* b = find(rows, "phase1", 2, "rate_bps_hz", 12, 50);
  CHECK(s->value == doctest::Approx(a->value + b->value).epsilon(1e-14).scale(0));
}

TEST_CASE("CSV formatting") {
  ResultRow r{"x", 5, "phase1(20)", 0, 50.0, "phase2_pilots", 12.0, "rate_bps_hz", 0.1, 0.0, 3};
  std::string csv = format_csv({r});
  CHECK(csv.rfind(csv_header(), 0) == 0);
  CHECK(csv_header() ==
        "experiment,seed,scheme,ue,kappa,sweep,sweep_value,metric,value,stderr,count\n");
  CHECK(csv.find("x,5,phase1(20),sum,50,phase2_pilots,12,rate_bps_hz,0.10000000000000001,0,3") !=
        std::string::npos);
}

TEST_CASE("experiment dispatch") {
  ScenarioConfig cfg = quick_config();
  RunRequest req;
  req.experiment = "nope";
  CHECK_THROWS_AS(run_experiment(cfg, req), InvalidArgument);
  req.experiment = "peb-sweep";
  req.workers = 0;
  CHECK_THROWS_AS(run_experiment(cfg, req), InvalidArgument);
  CHECK(experiment_names().size() == 6);
}
