#include <benchmark/benchmark.h>

#include "tsallis/bsde.hpp"
#include "tsallis/entropy.hpp"
#include "tsallis/lsmc.hpp"
#include "tsallis/pde.hpp"
#include "tsallis/random.hpp"

using namespace tsallis;

namespace {

MarketModel model() {
    MarketModel mk;
    mk.lambda = LambdaSpec::constant({0.6});
    return mk;
}

void BM_Philox(benchmark::State& state) {
    Philox4x32::Counter c{0, 0, 0, 0};
    for (auto _ : state) {
        c = Philox4x32::eval(c, {1, 2});
        benchmark::DoNotOptimize(c);
    }
    state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_Philox);

void BM_NormalStream(benchmark::State& state) {
    NormalStream s(1, 0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(s.next());
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NormalStream);

void BM_Simulate(benchmark::State& state) {
    const MarketModel mk = model();
    for (auto _ : state) {
        PathEnsemble ens = simulate(mk, TimeGrid::graded(1.0, 50, 3.0), static_cast<std::size_t>(state.range(0)), 1);
        ens.materialize();
        benchmark::DoNotOptimize(ens);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 50 * 2);
}
BENCHMARK(BM_Simulate)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_EntropyIntegral(benchmark::State& state) {
    const MarketModel mk = model();
    const PathEnsemble ens = simulate(mk, TimeGrid::uniform(1.0, 100), 10000, 1);
    const MeasureSpec ms = MeasureSpec::constant("a", {0.8});
    for (auto _ : state) benchmark::DoNotOptimize(tsallis_integral(mk, ens, ms, 2.0));
}
BENCHMARK(BM_EntropyIntegral)->Unit(benchmark::kMillisecond);

void BM_PdeSolve(benchmark::State& state) {
    const MarketModel mk = model();
    const Claim c = Claim::make("s", Payoff::parse("0.5+0.25*tanh(W[0])+0.25*tanh(Wp[0])"));
    PdeConfig cfg;
    cfg.points = static_cast<std::size_t>(state.range(0));
    cfg.steps = cfg.points - 1;
    cfg.richardson = Richardson::Off;
    cfg.snapshot_stride = 0;
    for (auto _ : state) benchmark::DoNotOptimize(solve_pde(c, mk, QGammaParams(2.0, 1.0), cfg).Y0);
}
BENCHMARK(BM_PdeSolve)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_Lsmc(benchmark::State& state) {
    const MarketModel mk = model();
    const PathEnsemble ens = simulate(mk, TimeGrid::graded(1.0, 20, 3.0), 20000, 1);
    const Claim c = state.range(0) ? Claim::make("d", Payoff::parse("ind(Wp[0])"))
                                   : Claim::make("s", Payoff::parse("0.5+0.25*tanh(W[0])+0.25*tanh(Wp[0])"));
    for (auto _ : state) benchmark::DoNotOptimize(solve_lsmc(c, mk, ens, QGammaParams(2.0, 1.0), LsmcConfig{}).Y0);
    state.SetLabel(state.range(0) ? "local_linear" : "polynomial");
}
BENCHMARK(BM_Lsmc)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Quadrature(benchmark::State& state) {
    const Claim c = Claim::make("d", Payoff::parse("ind(Wp[0])"));
    for (auto _ : state) benchmark::DoNotOptimize(unhedged_quadrature(c, QGammaParams(2.0, 1.0), 1.0));
}
BENCHMARK(BM_Quadrature);

}  // namespace
BENCHMARK_MAIN();
