// SPDX-License-Identifier: Apache-2.0
// Serial reference vs OpenMP kernels. Arguments are worker counts.

#include <benchmark/benchmark.h>

#include <thread>

#include "ilac/experiments.hpp"
#include "ilac/kernels.hpp"

using namespace ilac;

namespace {

ScenarioConfig reduced() { return parse_scenario(ILAC_SCENARIO_DIR "/reduced.cfg"); }

struct MarginalFixture {
  Scenario sc;
  std::unique_ptr<ChannelModel> model;
  std::vector<RisProfile> profiles;
  Mat3 cov = Mat3::Zero();

  MarginalFixture() : sc(reduced().build_scenario()) {
    model = std::make_unique<ChannelModel>(sc);
    Rng rng(1);
    profiles = random_profiles(sc, rng);
    cov(0, 0) = cov(1, 1) = 2.0;
  }
};

MarginalFixture& fixture() {
  static MarginalFixture f;
  return f;
}

void BM_MarginalSerial(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::marginal_moments_serial(
        *f.model, f.profiles, 0, f.sc.ue[0].pose.position, f.cov, 512, 7));
}

void BM_MarginalParallel(benchmark::State& state) {
  auto& f = fixture();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::marginal_moments_parallel(
        *f.model, f.profiles, 0, f.sc.ue[0].pose.position, f.cov, 512, 7, workers));
}

void BM_RisEnsemble(benchmark::State& state) {
  auto& f = fixture();
  const int workers = static_cast<int>(state.range(0));
  std::vector<Vec3> p_hat;
  for (const auto& u : f.sc.ue) p_hat.push_back(u.pose.position);
  Rng rng(2);
  auto ens = build_ensemble(f.sc, p_hat, std::vector<Mat3>(f.sc.n_ue(), f.cov), 16, 2, rng);
  auto init = random_profiles(f.sc, rng);
  RisOptOptions opt;
  opt.max_iterations = 3;
  opt.rel_tol = 0.0;
  opt.workers = workers;
  for (auto _ : state)
    benchmark::DoNotOptimize(optimize_profiles(*f.model, ens, init, per_ue_budgets(f.sc), opt));
}

void BM_MonteCarloRuns(benchmark::State& state) {
  ScenarioConfig cfg = reduced();
  cfg.ris_max_iterations = 5;
  RunRequest req;
  req.experiment = "ris-schemes";
  req.runs = 8;
  req.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, req));
}

void worker_args(benchmark::internal::Benchmark* b) {
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  for (int w = 1; w <= hw; w *= 2) b->Arg(w);
  if ((hw & (hw - 1)) != 0) b->Arg(hw);
}

}  // namespace

BENCHMARK(BM_MarginalSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MarginalParallel)->Apply(worker_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RisEnsemble)->Apply(worker_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarloRuns)->Apply(worker_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
