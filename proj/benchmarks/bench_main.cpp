#include <benchmark/benchmark.h>

#include "atomchain/bands.hpp"
#include "atomchain/dynamics.hpp"
#include "atomchain/lattice.hpp"
#include "atomchain/specfun.hpp"

using namespace atomchain;

static void BM_Polylog(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  double phi = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(specfun::polylog_unit_circle(m, specfun::PhaseAngle(phi)));
    phi += 1e-3;
    if (phi > 6.2) phi = 0.1;
  }
}
BENCHMARK(BM_Polylog)->DenseRange(1, 3);

static void BM_MomentumKernel(benchmark::State& state) {
  const MomentumKernel kernel{ChainParams{}};
  double k = 4.5 * kPi;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel.value(k));
    k += 1e-4;
    if (k > 7.5 * kPi) k = 4.5 * kPi;
  }
}
BENCHMARK(BM_MomentumKernel);

static void BM_BandSweep(benchmark::State& state) {
  GridSpec grid;
  grid.nodes = static_cast<int>(state.range(0));
  const ChainParams p;
  ControlField f;
  f.theta = kPi / 4;
  for (auto _ : state) benchmark::DoNotOptimize(band_sweep(p, f, grid));
  state.SetItemsProcessed(state.iterations() * grid.nodes);
}
BENCHMARK(BM_BandSweep)->Arg(512)->Arg(2048);

// One RK4 step is four operator applications.
static void BM_OperatorApply(benchmark::State& state) {
  ChainParams p;
  p.N = static_cast<int>(state.range(0));
  const ChainOperator op(p, ControlField{});
  StateVector c = StateVector::Random(2 * p.N), out;
  for (auto _ : state) {
    op.apply(0.7, c, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_OperatorApply)->Arg(200)->Arg(400);

static void BM_EvolveSteps(benchmark::State& state) {
  ChainParams p;
  p.N = 200;
  const ControlField f;
  const SpinWaveState s = make_bloch_wavepacket(p, f, Band::Lower, p.zone_edge(), 12.0);
  const ThetaSchedule sched = ThetaSchedule::constant(0.0, 1.0);
  EvolveOptions opt;
  opt.stride = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(evolve(s, p, f, sched, std::nullopt, 1.0, opt));
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_EvolveSteps)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
