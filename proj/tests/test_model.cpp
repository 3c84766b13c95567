#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "mvac/errors.hpp"
#include "mvac/model.hpp"

using namespace mvac;

TEST(MarketParams, RejectsNonPositiveRate) {
    EXPECT_THROW(MarketParams(0.0, 0.04), InvalidInput);
    EXPECT_THROW(MarketParams(-0.01, 0.04), InvalidInput);
    EXPECT_THROW(MarketParams(0.05, -1e-9), InvalidInput);
    EXPECT_NO_THROW(MarketParams(0.05, 0.0));
}

TEST(MarketParams, HermitianFlagAtTwiceTheRate) {
    EXPECT_TRUE(MarketParams(0.05, 0.1).hermitian());
    EXPECT_FALSE(MarketParams(0.05, 0.04).hermitian());
    EXPECT_DOUBLE_EQ(MarketParams(0.05, 0.04).drift_coefficient(), -0.03);
    EXPECT_DOUBLE_EQ(MarketParams(0.05, 0.04).sigma(), 0.2);
}

TEST(MGParams, Validation) {
    MGParams p;
    p.r = 0.05;
    EXPECT_NO_THROW(p.validate());
    p.rho = 1.5;
    EXPECT_THROW(p.validate(), InvalidInput);
    p.rho = 0.0;
    p.zeta = -0.1;
    EXPECT_THROW(p.validate(), InvalidInput);
    p.zeta = 0.1;
    p.mu = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(MGParams, CoefficientFunctions) {
    MGParams p{.r = 0.05, .lambda = 0.01, .mu = 0.02, .zeta = 0.3, .alpha = 1.5, .rho = -0.4};
    const double y = std::log(0.04);
    const double ey = 0.04;
    EXPECT_NEAR(p.volatility_drift(y), 0.01 / ey + 0.02 - 0.045 * ey, 1e-14);
    EXPECT_NEAR(p.cross_coefficient(y), -0.4 * 0.3 * ey, 1e-15);
    EXPECT_NEAR(p.volatility_diffusion(y), 0.09 * ey, 1e-15);
}

TEST(Grid1D, Construction) {
    EXPECT_THROW(Grid1D(1.0, 1.0, 10), InvalidInput);
    EXPECT_THROW(Grid1D(0.0, 1.0, 2), InvalidInput);
    EXPECT_THROW(Grid1D(0.0, std::numeric_limits<double>::infinity(), 10), InvalidInput);
    const Grid1D g(-1.0, 1.0, 5);
    EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
    EXPECT_DOUBLE_EQ(g.point(0), -1.0);
    EXPECT_DOUBLE_EQ(g.point(4), 1.0);
    EXPECT_EQ(g.nearest_index(0.26), 3u);
    EXPECT_EQ(g.nearest_index(-9.0), 0u);
    EXPECT_EQ(g.nearest_index(9.0), 4u);
    EXPECT_EQ(g.points().size(), 5u);
}

TEST(Grid1D, CenteredOnSpot) {
    const auto g = Grid1D::centered_on_spot(100.0, 0.04, 1.0, 101);
    EXPECT_NEAR(g.x_min(), std::log(100.0) - 1.2, 1e-12);
    EXPECT_NEAR(g.x_max(), std::log(100.0) + 1.2, 1e-12);
}

TEST(Grid2D, FlattensXOuter) {
    const Grid2D g(Grid1D(0.0, 1.0, 3), Grid1D(0.0, 2.0, 5));
    EXPECT_EQ(g.size(), 15u);
    EXPECT_EQ(g.index(1, 2), 7u);
    EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
}

TEST(StateVector, ValidatesAndInterpolates) {
    const Grid1D g(0.0, 2.0, 3);
    EXPECT_THROW(StateVector(g, {1.0, 2.0}), InvalidInput);
    EXPECT_THROW(StateVector(g, {1.0, std::nan(""), 2.0}), InvalidInput);
    const StateVector s(g, {0.0, 2.0, -4.0});
    EXPECT_DOUBLE_EQ(s.interpolate(0.5), 1.0);
    EXPECT_DOUBLE_EQ(s.interpolate(1.5), -1.0);
    EXPECT_DOUBLE_EQ(s.max_abs(), 4.0);
    EXPECT_THROW((void)s.interpolate(2.5), InvalidInput);
}

TEST(StateVector, MartingaleStates) {
    const Grid1D gx(-1.0, 1.0, 5);
    const auto s = sample_martingale_state(gx);
    for (std::size_t i = 0; i < gx.size(); ++i) EXPECT_DOUBLE_EQ(s[i], std::exp(gx.point(i)));

    const Grid2D g(gx, Grid1D(-2.0, 0.0, 3));
    const auto e = sample_extended_martingale_state(g);
    EXPECT_DOUBLE_EQ(e[g.index(3, 1)], std::exp(gx.point(3) - 1.0));
}
