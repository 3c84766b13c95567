#include <benchmark/benchmark.h>

#include "mvac/martingale.hpp"
#include "mvac/sde.hpp"

namespace {

void BM_NormalStream(benchmark::State& state) {
    mvac::NormalStream z(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(z.next());
}
BENCHMARK(BM_NormalStream);

void BM_SimulateGbm(benchmark::State& state) {
    const mvac::SDEParams sp{0.05, mvac::MarketParams(0.05, 0.04)};
    const auto paths = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(mvac::simulate_gbm(sp, 100.0, 1.0, 0.01, paths, 7, 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_SimulateGbm)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SimulateMg(benchmark::State& state) {
    const mvac::MGParams p{.r = 0.05, .lambda = 0.1, .mu = -2.0, .zeta = 0.3, .alpha = 0.5,
                           .rho = -0.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mvac::simulate_mg(p, 0.05, 100.0, 0.04, 1.0, 0.01, 1000, 7, 1));
    }
    state.SetItemsProcessed(state.iterations() * 1000 * 100);
}
BENCHMARK(BM_SimulateMg)->Unit(benchmark::kMillisecond);

void BM_McMartingaleCheck(benchmark::State& state) {
    const mvac::SDEParams sp{0.05, mvac::MarketParams(0.05, 0.04)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mvac::mc_martingale_check(sp, 100.0, 1.0, 100000, 7, 1));
    }
}
BENCHMARK(BM_McMartingaleCheck)->Unit(benchmark::kMillisecond);

}  // namespace
