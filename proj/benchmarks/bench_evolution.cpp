#include <benchmark/benchmark.h>

#include "mvac/evolution.hpp"

namespace {

void BM_PriceCall(benchmark::State& state) {
    const mvac::MarketParams p(0.05, 0.04);
    const auto g = mvac::Grid1D::centered_on_spot(100.0, 0.04, 1.0,
                                                  static_cast<std::size_t>(state.range(0)));
    const auto payoff = mvac::Payoff::call(100.0);
    const mvac::PricingConfig cfg{.n_steps = 200};
    for (auto _ : state) benchmark::DoNotOptimize(mvac::price_option(p, payoff, 1.0, g, cfg));
}
BENCHMARK(BM_PriceCall)->Arg(401)->Arg(1601)->Unit(benchmark::kMillisecond);

void BM_EvolveUnitary(benchmark::State& state) {
    const mvac::MarketParams p(0.05, 0.1);
    const mvac::Grid1D g(-4.0, 4.0, 801);
    const auto op = mvac::build_bs_hamiltonian(p, g, mvac::BoundaryTag::DirichletZero);
    std::vector<double> v;
    for (double x : g.points()) v.push_back(std::exp(-2.0 * x * x));
    const mvac::StateVector psi(g, v);
    const mvac::EvolutionConfig cfg{.dt = 1e-3,
                                    .n_steps = static_cast<std::size_t>(state.range(0)),
                                    .mode = mvac::EvolutionMode::Unitary};
    for (auto _ : state) benchmark::DoNotOptimize(mvac::evolve(op, psi, cfg));
}
BENCHMARK(BM_EvolveUnitary)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KernelRow(benchmark::State& state) {
    const mvac::MarketParams p(0.05, 0.04);
    const mvac::Grid1D g(-4.0, 4.0, 801);
    for (auto _ : state) benchmark::DoNotOptimize(mvac::kernel_row(p, 0.0, 0.5, g));
}
BENCHMARK(BM_KernelRow)->Unit(benchmark::kMillisecond);

}  // namespace
