#include <benchmark/benchmark.h>

#include "qsl/analytic.hpp"
#include "qsl/oracle.hpp"
#include "qsl/qslt.hpp"
#include "qsl/sweep.hpp"

namespace {

qsl::ModelConfig config(qsl::Topology t) {
    qsl::ModelConfig cfg;
    cfg.topology = t;
    cfg.J = 1.5;
    cfg.tau = 3.0;
    cfg.spectral = qsl::SpectralParams{4.0, 2.0, 1.0};
    return cfg;
}

void BM_ClosedFormTrajectory(benchmark::State& state) {
    const auto cfg = config(static_cast<qsl::Topology>(state.range(0)));
    const auto grid = qsl::uniform_grid(cfg.tau, 2001);
    for (auto _ : state) benchmark::DoNotOptimize(qsl::sample_analytic(cfg, grid));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_ClosedFormTrajectory)->DenseRange(0, 2);

void BM_SpeedLimit(benchmark::State& state) {
    const auto cfg = config(qsl::Topology::IndependentBaths);
    for (auto _ : state) benchmark::DoNotOptimize(qsl::evaluate_point(cfg, 2001));
}
BENCHMARK(BM_SpeedLimit);

void BM_KernelOracle(benchmark::State& state) {
    const auto cfg = config(static_cast<qsl::Topology>(state.range(0)));
    const auto grid = qsl::uniform_grid(cfg.tau, 201);
    for (auto _ : state) benchmark::DoNotOptimize(qsl::integrate_kernel(cfg, grid));
}
BENCHMARK(BM_KernelOracle)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_DiscreteBath(benchmark::State& state) {
    const auto cfg = config(qsl::Topology::IndependentBaths);
    const auto bath = qsl::make_discrete_bath(cfg.spectral, static_cast<std::size_t>(state.range(0)));
    const auto grid = qsl::uniform_grid(cfg.tau, 101);
    for (auto _ : state) benchmark::DoNotOptimize(qsl::integrate_discrete_bath(cfg, bath, grid));
}
BENCHMARK(BM_DiscreteBath)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
    qsl::SweepSpec spec;
    spec.gamma0 = {0.1, 10.0, static_cast<std::size_t>(state.range(0))};
    spec.J = {0.0, 10.0, static_cast<std::size_t>(state.range(0))};
    spec.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(qsl::run_sweep(spec));
}
BENCHMARK(BM_Sweep)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
