#include <benchmark/benchmark.h>

#include "mvac/martingale.hpp"
#include "mvac/vacuum.hpp"

namespace {

void BM_BsVacuumExact(benchmark::State& state) {
    const mvac::MarketParams p(0.05, 0.04);
    int n = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mvac::bs_vacuum_exact(p, n));
        n = n % 20 + 1;
    }
}
BENCHMARK(BM_BsVacuumExact);

void BM_MgCaseSolver(benchmark::State& state) {
    const mvac::MGParams p{.r = 0.05, .lambda = 0.01, .mu = 0.3, .zeta = 0.2, .alpha = 1.0,
                           .rho = -0.3};
    for (auto _ : state) benchmark::DoNotOptimize(mvac::mg_case_solver(p, -3.2, 1, 1));
}
BENCHMARK(BM_MgCaseSolver);

void BM_ExtendedConstraint(benchmark::State& state) {
    const mvac::MGParams p{.r = 0.05, .lambda = 0.01, .mu = -0.5, .zeta = 0.2, .alpha = 0.8,
                           .rho = -0.3};
    for (auto _ : state) benchmark::DoNotOptimize(mvac::solve_extended_constraint(p, -10.0, 0.0));
}
BENCHMARK(BM_ExtendedConstraint);

}  // namespace
