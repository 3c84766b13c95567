#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mvac/errors.hpp"
#include "mvac/martingale.hpp"
#include "oracles.hpp"

using namespace mvac;

TEST(MartingaleResidual, BsAnnihilatesExponential) {
    const Grid1D g(-4.0, 4.0, 801);
    const auto s = sample_martingale_state(g);
    const auto rep = martingale_residual(build_bs_hamiltonian(MarketParams(0.05, 0.04), g), s,
                                         grid_scaled_tolerance(s));
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.rows_checked, 799u);
    EXPECT_DOUBLE_EQ(rep.h, 0.01);
    EXPECT_NEAR(rep.tolerance, 10.0 * 1e-4 * std::exp(4.0), 1e-12);
    EXPECT_GT(rep.residual_l2, 0.0);
}

TEST(MartingaleResidual, SquaredExponentialFails) {
    const MarketParams p(0.05, 0.04);
    const Grid1D g(-1.0, 1.0, 201);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::exp(2.0 * g.point(i));
    const StateVector s(g, v);
    const auto rep = martingale_residual(build_bs_hamiltonian(p, g), s, grid_scaled_tolerance(s));
    EXPECT_FALSE(rep.pass);
    // Largest interior node sits one step inside x_max.
    const double expected = (0.04 + 0.05) * std::exp(2.0 * g.point(g.size() - 2));
    EXPECT_NEAR(rep.residual_max, expected, 1e-3 * expected);
}

TEST(MartingaleResidual, MgWithFrozenVolatility) {
    const MGParams p{.r = 0.05, .lambda = 0.01, .mu = -0.2, .zeta = 0.1, .alpha = 1.0, .rho = 0.2};
    const Grid2D g(Grid1D(-1.0, 1.0, 81), Grid1D(-4.0, -2.0, 41));
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < 81; ++i) {
        for (std::size_t j = 0; j < 41; ++j) v[g.index(i, j)] = std::exp(g.x_axis().point(i));
    }
    const StateVector s(g, v);
    const auto rep = martingale_residual(build_mg_hamiltonian(p, g), s, grid_scaled_tolerance(s));
    EXPECT_TRUE(rep.pass);
}

TEST(MartingaleResidual, RejectsForeignGridAndNonInteriorRows) {
    const auto op = build_bs_hamiltonian(MarketParams(0.05, 0.04), Grid1D(-1, 1, 11));
    const auto other = sample_martingale_state(Grid1D(-1, 1, 12));
    EXPECT_THROW(martingale_residual(op, other, 1.0), InvalidInput);
    const auto s = sample_martingale_state(Grid1D(-1, 1, 11));
    const std::vector<std::size_t> rows{0};
    EXPECT_THROW(martingale_residual(op, s, 1.0, rows), InvalidInput);
    const std::vector<std::size_t> ok{3, 4};
    EXPECT_EQ(martingale_residual(op, s, 1.0, ok).rows_checked, 2u);
}

TEST(ExtendedConstraint, NamedZeros) {
    const MGParams a{.r = 0.05, .lambda = 0.01, .mu = -0.3, .zeta = 0.1, .alpha = 1.0, .rho = 0.0};
    EXPECT_NEAR(extended_constraint_residual(a, std::log(0.01 / 0.295)), 0.0, 1e-12);
    const MGParams b{.r = 0.05, .lambda = 0.01, .mu = -0.02};
    EXPECT_NEAR(extended_constraint_residual(b, std::log(0.5)), 0.0, 1e-12);
    EXPECT_EQ(extended_constraint_residual(MGParams{}, 0.3), 0.0);
}

TEST(ExtendedConstraint, SolverAgreesWithScanOracle) {
    const MGParams a{.r = 0.05, .lambda = 0.01, .mu = -0.3, .zeta = 0.1, .alpha = 1.0, .rho = 0.0};
    const auto root = solve_extended_constraint(a, -6.0, 0.0);
    EXPECT_NEAR(root.y_star, std::log(0.01 / 0.295), 1e-12);
    EXPECT_LE(std::abs(root.residual), 1e-14);
    EXPECT_GT(root.iterations, 0);

    oracle::Draws d(5);
    for (int k = 0; k < 50; ++k) {
        MGParams p{.r = 0.05,
                   .lambda = d.uniform(0.001, 0.05),
                   .mu = d.uniform(-1.0, -0.1),
                   .zeta = d.uniform(0.0, 0.4),
                   .alpha = d.uniform(0.5, 1.5),
                   .rho = d.uniform(-1.0, 1.0)};
        auto f = [&](double y) { return extended_constraint_residual(p, y); };
        const auto roots = oracle::scan_bisect(f, -10.0, 0.0, 1e-3);
        if (roots.size() != 1) continue;
        const auto r = solve_extended_constraint(p, -10.0, 0.0);
        EXPECT_NEAR(r.y_star, roots[0], 1e-9);
    }
}

TEST(ExtendedConstraint, NoRootForPositiveExpression) {
    const MGParams p{.r = 0.05, .lambda = 0.01, .mu = 0.3, .zeta = 0.1, .alpha = 1.0, .rho = 0.0};
    EXPECT_THROW(solve_extended_constraint(p, -6.0, 0.0), NoRootError);
    try {
        solve_extended_constraint(p, -6.0, 0.0);
    } catch (const NumericalFailure& e) {
        EXPECT_EQ(e.kind(), "no-root");
    }
    EXPECT_THROW(solve_extended_constraint(p, 0.0, -6.0), InvalidInput);
}

TEST(ExtendedConstraint, HermitianConsistency) {
    MGParams p{.r = 0.05, .zeta = 0.1, .alpha = 1.5, .rho = -0.1};
    auto rep = hermitian_extended_consistency(p);
    EXPECT_EQ(rep.kind, ConsistencyReport::Kind::ParameterIdentity);
    EXPECT_TRUE(rep.identity_holds);
    EXPECT_FALSE(rep.y.has_value());

    p.rho = 0.3;
    rep = hermitian_extended_consistency(p);
    EXPECT_FALSE(rep.identity_holds);
    EXPECT_NEAR(rep.identity_residual, 0.4, 1e-15);

    p.alpha = 1.0;
    EXPECT_EQ(hermitian_extended_consistency(p).kind, ConsistencyReport::Kind::NoSolution);
    p.rho = -0.05;
    rep = hermitian_extended_consistency(p);
    ASSERT_EQ(rep.kind, ConsistencyReport::Kind::YRoot);
    EXPECT_NEAR(std::exp(*rep.y * (p.alpha - 1.5)), 0.5, 1e-14);

    p.zeta = 0.0;
    p.rho = 0.0;
    EXPECT_EQ(hermitian_extended_consistency(p).kind, ConsistencyReport::Kind::Degenerate);
}

TEST(McMartingale, RiskNeutralPasses) {
    const SDEParams sp{0.05, MarketParams(0.05, 0.04)};
    const auto res = mc_martingale_check(sp, 100.0, 1.0, 100000, 42);
    EXPECT_TRUE(res.passes());
    EXPECT_EQ(res.n_paths, 100000u);
}

TEST(McMartingale, ZeroVolatilityIsExact) {
    const SDEParams sp{0.05, MarketParams(0.05, 0.0)};
    const auto res = mc_martingale_check(sp, 100.0, 1.0, 1000, 1);
    EXPECT_NEAR(res.statistic, 0.0, 1e-12);
}

TEST(McMartingale, WrongDriftIsDetected) {
    const SDEParams sp{0.07, MarketParams(0.05, 0.04)};
    const auto res = mc_martingale_check(sp, 100.0, 1.0, 100000, 42);
    EXPECT_FALSE(res.passes());
    EXPECT_NEAR(res.statistic, 100.0 * (std::exp(0.02) - 1.0), 4.0 * res.standard_error);
}

TEST(McMartingale, ValidatesInputs) {
    const SDEParams sp{0.05, MarketParams(0.05, 0.04)};
    EXPECT_THROW(mc_martingale_check(sp, 100.0, 1.0, 999, 1), InvalidInput);
    EXPECT_THROW(mc_martingale_check(sp, -1.0, 1.0, 1000, 1), InvalidInput);
    const SDEParams mg{0.05, MGParams{.r = 0.05}};
    EXPECT_THROW(mc_martingale_check(mg, 100.0, 1.0, 1000, 1), InvalidInput);
}

TEST(McMartingale, MertonGarmanRiskNeutral) {
    const MGParams p{.r = 0.05, .lambda = 0.01, .mu = -0.5, .zeta = 0.2, .alpha = 1.0, .rho = -0.3};
    const auto res = mc_martingale_check_mg(p, 0.05, 100.0, 0.04, 1.0, 1e-2, 20000, 9);
    EXPECT_TRUE(res.passes());
}
