#include <benchmark/benchmark.h>

#include "spinline/evolve.hpp"
#include "spinline/kernels.hpp"
#include "spinline/noise.hpp"

using namespace spinline;

namespace {

RobustnessConfig small_monte_carlo(kernels::Execution mode) {
  RobustnessConfig c;
  c.n_chain = 60;
  c.width = 10.0;
  c.model.fluctuation = FluctuationKind::kRelative;
  c.model.bound = 0.1;
  c.model.seed = 1;
  c.trials = 16;
  c.execution = mode;
  return c;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const RobustnessConfig c = small_monte_carlo(kernels::Execution::kSerial);
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(c).mean_fidelity);
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const RobustnessConfig c = small_monte_carlo(kernels::Execution::kParallel);
  state.counters["threads"] = kernels::thread_cap();
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(c).mean_fidelity);
}

void BM_Transfer(benchmark::State& state) {
  const auto integrator = state.range(1) == 0 ? Integrator::kChebyshev : Integrator::kDense;
  const PulseSchedule s = make_transfer_schedule(static_cast<int>(state.range(0)), 10.0, 3.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(run_transfer(s, integrator).probability);
}

void BM_ChebyshevStep(benchmark::State& state) {
  const SingleParticleSystem chain = build_uniform_chain(static_cast<std::size_t>(state.range(0)), 0.0);
  const kernels::HoppingOperator op = chain.hopping_operator();
  AmplitudeVector psi = AmplitudeVector::Zero(static_cast<Eigen::Index>(op.dimension()));
  psi[0] = 1.0;
  for (auto _ : state) {
    kernels::chebyshev_evolve(op, 0.1, psi);
    benchmark::DoNotOptimize(psi.data());
  }
}

void BM_DenseStep(benchmark::State& state) {
  const SingleParticleSystem chain = build_uniform_chain(static_cast<std::size_t>(state.range(0)), 0.0);
  const ComplexMatrix h = chain.dense().cast<Complex>();
  AmplitudeVector psi = AmplitudeVector::Zero(h.rows());
  psi[0] = 1.0;
  for (auto _ : state) {
    kernels::dense_evolve(h, 0.1, psi);
    benchmark::DoNotOptimize(psi.data());
  }
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Transfer)->Args({100, 0})->Args({100, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChebyshevStep)->Arg(102)->Arg(1002);
BENCHMARK(BM_DenseStep)->Arg(102)->Arg(402);

BENCHMARK_MAIN();
