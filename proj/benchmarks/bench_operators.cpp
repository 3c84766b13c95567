#include <benchmark/benchmark.h>

#include "mvac/martingale.hpp"
#include "mvac/operators.hpp"

namespace {

void BM_BuildBs(benchmark::State& state) {
    const mvac::MarketParams p(0.05, 0.04);
    const mvac::Grid1D g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mvac::build_bs_hamiltonian(p, g));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildBs)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_BuildMg(benchmark::State& state) {
    const mvac::MGParams p{.r = 0.05, .lambda = 0.01, .mu = -0.5, .zeta = 0.2, .alpha = 1.0,
                           .rho = -0.3};
    const auto n = static_cast<std::size_t>(state.range(0));
    const mvac::Grid2D g(mvac::Grid1D(-1.0, 1.0, n), mvac::Grid1D(-4.2, -2.2, n));
    for (auto _ : state) benchmark::DoNotOptimize(mvac::build_mg_hamiltonian(p, g));
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_BuildMg)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_MartingaleResidual(benchmark::State& state) {
    const mvac::MarketParams p(0.05, 0.04);
    const mvac::Grid1D g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
    const auto op = mvac::build_bs_hamiltonian(p, g);
    const auto s = mvac::sample_martingale_state(g);
    for (auto _ : state) benchmark::DoNotOptimize(mvac::martingale_residual(op, s, 1e-3));
}
BENCHMARK(BM_MartingaleResidual)->Arg(801)->Arg(6401);

void BM_SimilarityTransform(benchmark::State& state) {
    const mvac::MarketParams p(0.05, 0.04);
    const mvac::Grid1D g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
    const auto v = mvac::Potential::constant(0.05);
    for (auto _ : state) benchmark::DoNotOptimize(mvac::similarity_transform(p, v, g));
}
BENCHMARK(BM_SimilarityTransform)->Arg(801)->Arg(6401);

}  // namespace
