#include <benchmark/benchmark.h>

#include <memory>

#include "mledr/divergences.hpp"
#include "mledr/estimation.hpp"
#include "mledr/montecarlo.hpp"

using namespace mledr;

static void BM_GaussianSampling(benchmark::State& state) {
  const auto g = DensityModel::gaussian();
  RandomStream rng(1, 0, 0);
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    g.sample_into(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GaussianSampling)->Arg(1024);

static void BM_StableSampling(benchmark::State& state) {
  const auto s = DensityModel::stable(1.5);
  RandomStream rng(1, 0, 0);
  std::vector<double> out(1024);
  for (auto _ : state) {
    s.sample_into(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_StableSampling);

static void BM_KlDivergence(benchmark::State& state) {
  const auto f = DensityModel::gaussian(0, 1), g = DensityModel::cauchy();
  for (auto _ : state) benchmark::DoNotOptimize(kl_divergence(f, g).value);
}
BENCHMARK(BM_KlDivergence);

static void BM_ProfileMle(benchmark::State& state) {
  const ParamSpace space(1, {{0.5, 2.0}}, FamilyBinder::gaussian_sd(1.0));
  RandomStream rng(2, 0, 0);
  const auto xs = DensityModel::gaussian().sample(rng, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mle(xs, space, {0, {1.0}}).tauHat);
}
BENCHMARK(BM_ProfileMle)->Arg(16)->Arg(100);

static void BM_EstimateQn(benchmark::State& state) {
  ExperimentConfig c;
  c.space = std::make_shared<ParamSpace>(1, std::vector<Interval>{}, FamilyBinder::gaussian_mean(1.0));
  c.nGrid = {16};
  c.replications = 20000;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_qn(c).front().hits);
  state.SetItemsProcessed(state.iterations() * c.replications);
}
BENCHMARK(BM_EstimateQn)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
