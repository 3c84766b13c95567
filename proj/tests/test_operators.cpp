#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "mvac/errors.hpp"
#include "mvac/operators.hpp"
#include "oracles.hpp"

using namespace mvac;

namespace {

double max_interior_residual(const OperatorMatrix& op, const std::vector<double>& u) {
    const auto hu = op.apply(u);
    double worst = 0.0;
    for (auto i : op.interior_indices()) worst = std::max(worst, std::abs(hu[i]));
    return worst;
}

std::vector<double> sorted_real_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<double> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        EXPECT_LT(std::abs(es.eigenvalues()[k].imag()), 1e-8);
        out.push_back(es.eigenvalues()[k].real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(BsHamiltonian, InteriorStencilCoefficients) {
    const MarketParams p(0.05, 0.04);
    const Grid1D g(-1.0, 1.0, 11);
    const auto op = build_bs_hamiltonian(p, g);
    const double h = g.spacing();
    const double a = 0.02;
    const double b = 0.02 - 0.05;
    EXPECT_NEAR(op.coeff(5, 4), -a / (h * h) - b / (2 * h), 1e-12);
    EXPECT_NEAR(op.coeff(5, 5), 2 * a / (h * h) + 0.05, 1e-12);
    EXPECT_NEAR(op.coeff(5, 6), -a / (h * h) + b / (2 * h), 1e-12);
    EXPECT_EQ(op.row_kinds()[0], RowKind::Boundary);
    EXPECT_EQ(op.row_kinds()[10], RowKind::Boundary);
    EXPECT_EQ(op.interior_indices().size(), 9u);
}

TEST(BsHamiltonian, DirichletTagZeroesEdgeRows) {
    const auto op = build_bs_hamiltonian(MarketParams(0.05, 0.04), Grid1D(-1, 1, 11),
                                         BoundaryTag::DirichletZero);
    EXPECT_TRUE(op.has_dirichlet_rows());
    EXPECT_EQ(op.matrix().row(0).nonZeros(), 0);
    EXPECT_EQ(op.matrix().row(10).nonZeros(), 0);
    EXPECT_THROW((void)op.transposed(), InvalidInput);
}

TEST(BsHamiltonian, AnnihilatesConstantsUpToRate) {
    const MarketParams p(0.03, 0.09);
    const Grid1D g(-2.0, 2.0, 41);
    const auto hu = build_bs_hamiltonian(p, g).apply(std::vector<double>(41, 1.0));
    for (double v : hu) EXPECT_NEAR(v, 0.03, 1e-11);
}

TEST(BsHamiltonian, MartingaleResidualIsSecondOrder) {
    oracle::Draws d(3);
    for (int trial = 0; trial < 10; ++trial) {
        const MarketParams p(d.uniform(0.01, 0.1), d.uniform(0.01, 0.3));
        double prev = 0.0;
        for (std::size_t n : {101u, 201u, 401u}) {
            const Grid1D g(-1.0, 1.0, n);
            const auto state = sample_martingale_state(g);
            const auto op = build_bs_hamiltonian(p, g);
            const std::vector<double> u(state.values().begin(), state.values().end());
            const double res = max_interior_residual(op, u);
            // Edge rows are second order too.
            const auto hu = op.apply(u);
            EXPECT_LT(std::abs(hu.front()), 50.0 * g.spacing() * g.spacing());
            EXPECT_LT(std::abs(hu.back()), 50.0 * g.spacing() * g.spacing() * std::exp(1.0));
            if (prev > 0.0) {
                EXPECT_GT(prev / res, 3.5);
                EXPECT_LT(prev / res, 4.5);
            }
            prev = res;
        }
    }
}

TEST(HermiticityDefect, MatchesDriftOverTwoH) {
    const Grid1D g(-1.0, 1.0, 51);
    for (double s2 : {0.02, 0.1, 0.3}) {
        const MarketParams p(0.05, s2);
        const double expected = std::abs(0.5 * s2 - 0.05) / (2.0 * g.spacing());
        EXPECT_NEAR(hermiticity_defect(build_bs_hamiltonian(p, g)), expected, 1e-10);
    }
    EXPECT_EQ(hermiticity_defect(build_bs_hamiltonian(MarketParams(0.05, 0.1), g)), 0.0);
}

TEST(Potential, BarrierRegionsAreOpen) {
    const auto dao = Potential::down_and_out(0.0);
    EXPECT_TRUE(dao.is_barrier());
    EXPECT_TRUE(dao.knocked_out(-1e-3));
    EXPECT_FALSE(dao.knocked_out(0.0));
    const auto dko = Potential::double_knock_out(-1.0, 1.0);
    EXPECT_TRUE(dko.knocked_out(1.5));
    EXPECT_FALSE(dko.knocked_out(1.0));
    EXPECT_FALSE(dko.knocked_out(-1.0));
    EXPECT_THROW(Potential::double_knock_out(1.0, 1.0), InvalidInput);
}

TEST(Potential, TabulatedInterpolates) {
    const auto v = Potential::tabulated({0.0, 1.0, 3.0}, {1.0, 3.0, 7.0});
    EXPECT_DOUBLE_EQ(v(0.5), 2.0);
    EXPECT_DOUBLE_EQ(v(2.0), 5.0);
    EXPECT_THROW(Potential::tabulated({0.0, 0.0}, {1.0, 2.0}), InvalidInput);
}

TEST(EffectiveBs, BarrierNodesBecomeDirichletRows) {
    const Grid1D g(-1.0, 1.0, 21);
    const auto op = build_effective_bs(MarketParams(0.05, 0.04), Potential::down_and_out(-0.25), g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const bool dead = g.point(i) < -0.25 - 1e-12;
        EXPECT_EQ(op.row_kinds()[i] == RowKind::Dirichlet, dead) << i;
    }
    const auto dko = build_double_knockout(MarketParams(0.05, 0.04),
                                           Potential::double_knock_out(-0.5, 0.5), g);
    EXPECT_EQ(dko.interior_indices().size(), 11u);
    EXPECT_THROW(build_double_knockout(MarketParams(0.05, 0.04),
                                       Potential::double_knock_out(-2.0, 0.5), g),
                 InvalidInput);
}

TEST(EffectiveBs, ConstantPotentialReducesToBs) {
    const MarketParams p(0.04, 0.06);
    const Grid1D g(-1.0, 1.0, 31);
    const auto a = build_bs_hamiltonian(p, g);
    const auto b = build_effective_bs(p, Potential::constant(0.04), g);
    EXPECT_EQ((Eigen::MatrixXd(a.matrix()) - Eigen::MatrixXd(b.matrix())).norm(), 0.0);
    EXPECT_THROW(build_effective_bs(p, Potential::tabulated([](double) { return NAN; }), g),
                 InvalidInput);
}

TEST(SimilarityTransform, HermitianBlockAndSpectrum) {
    const MarketParams p(0.05, 0.04);
    const Grid1D g(-2.0, 2.0, 101);
    const auto res = similarity_transform(p, Potential::constant(0.05), g);
    EXPECT_EQ(hermiticity_defect(res.hermitian), 0.0);
    EXPECT_NEAR(res.transform.gamma, 0.07 * 0.07 / 0.08, 1e-15);
    EXPECT_NEAR(res.transform.alpha_coef, -0.75, 1e-15);
    const auto herm = similarity_transform(MarketParams(0.05, 0.1), Potential::constant(0.05), g);
    EXPECT_NEAR(herm.transform.gamma, 0.05, 1e-15);
    EXPECT_EQ(herm.transform.alpha_coef, 0.0);

    const auto eff = build_bs_hamiltonian(p, g);
    const auto a = sorted_real_eigenvalues(eff.interior_block());
    const auto b = sorted_real_eigenvalues(res.hermitian.interior_block());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-8 * (1 + std::abs(a[k])));
}

TEST(SimilarityTransform, GaugeMatchesClosedForm) {
    const MarketParams p(0.05, 0.04);
    const Grid1D g(-1.0, 1.0, 201);
    const auto res = similarity_transform(p, Potential::constant(0.05), g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.point(i);
        EXPECT_NEAR(res.transform.s_values[i], res.transform.alpha_coef * x, 1e-12);
        EXPECT_NEAR(res.transform.discrete_gauge[i] - res.transform.discrete_gauge[100],
                    res.transform.alpha_coef * x, 1e-4);
    }
}

TEST(SimilarityTransform, ConjugationIdentityConverges) {
    const MarketParams p(0.05, 0.04);
    const auto v = Potential::tabulated([](double x) { return 0.05 + 0.01 * std::sin(x); });
    double prev = 0.0;
    for (std::size_t n : {101u, 201u, 401u}) {
        const Grid1D g(-1.0, 1.0, n);
        const auto res = similarity_transform(p, v, g);
        const auto eff = build_effective_bs(p, v, g);
        std::vector<double> u(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = g.point(i);
            u[i] = std::exp(-x * x) * std::cos(2 * x);
            w[i] = std::exp(-res.transform.s_values[i]) * u[i];
        }
        const auto lhs = eff.apply(u);
        const auto hw = res.hermitian.apply(w);
        double worst = 0.0;
        for (auto i : eff.interior_indices()) {
            worst = std::max(worst, std::abs(lhs[i] - std::exp(res.transform.s_values[i]) * hw[i]));
        }
        if (prev > 0.0) {
            EXPECT_GT(prev / worst, 3.0);
        }
        prev = worst;
    }
}

TEST(SimilarityTransform, MatchesDirectHermitianOperator) {
    const MarketParams p(0.05, 0.04);
    const Grid1D g(-2.0, 2.0, 201);
    const auto v = Potential::constant(0.05);
    const auto a = sorted_real_eigenvalues(similarity_transform(p, v, g).hermitian.interior_block());
    const auto b = sorted_real_eigenvalues(build_hermitian_direct(p, v, g).interior_block());
    // Lowest modes agree to discretization error.
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(a[k], b[k], 1e-2 * (1 + std::abs(a[k])));
    EXPECT_THROW(similarity_transform(MarketParams(0.05, 0.0), v, g), InvalidInput);
}

TEST(Momentum, DerivativeOfExponential) {
    const Grid1D g(-1.0, 1.0, 401);
    const auto s = sample_martingale_state(g);
    const auto ds = apply_momentum(s, g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(ds[i], s[i], 1e-4);

    const Grid2D g2(Grid1D(-1.0, 1.0, 81), Grid1D(-3.0, -2.0, 41));
    const auto e = sample_extended_martingale_state(g2);
    const auto dx = apply_momentum(e, g2, Axis::X);
    const auto dy = apply_momentum(e, g2, Axis::Y);
    for (std::size_t k = 0; k < g2.size(); ++k) {
        EXPECT_NEAR(dx[k], e[k], 1e-3 * e[k]);
        EXPECT_NEAR(dy[k], e[k], 1e-3 * e[k]);
    }
}

TEST(MgHamiltonian, EdgesAreDirichletAndStencilHasNinePoints) {
    const MGParams p{.r = 0.05, .lambda = 0.01, .mu = 0.02, .zeta = 0.1, .alpha = 1.0, .rho = 0.3};
    const Grid2D g(Grid1D(-1.0, 1.0, 11), Grid1D(-4.0, -2.0, 9));
    const auto op = build_mg_hamiltonian(p, g);
    EXPECT_EQ(op.boundary(), BoundaryTag::DirichletZero);
    EXPECT_EQ(op.interior_indices().size(), 9u * 7u);
    EXPECT_EQ(op.matrix().row(static_cast<Eigen::Index>(g.index(5, 4))).nonZeros(), 9);
    EXPECT_EQ(op.matrix().row(static_cast<Eigen::Index>(g.index(0, 4))).nonZeros(), 0);
}

TEST(MgHamiltonian, ReducesToBsAlongXWhenVolatilityFrozen) {
    const MGParams p{.r = 0.05};
    const Grid1D gx(-1.0, 1.0, 21);
    const double y = std::log(0.04);
    const Grid2D g(gx, Grid1D(y - 0.1, y + 0.1, 3));
    const auto mg = build_mg_hamiltonian(p, g);
    const auto bs = build_bs_hamiltonian(MarketParams(0.05, 0.04), gx);
    for (std::size_t i = 1; i + 1 < gx.size(); ++i) {
        for (std::size_t k = i - 1; k <= i + 1; ++k) {
            EXPECT_NEAR(mg.coeff(g.index(i, 1), g.index(k, 1)), bs.coeff(i, k), 1e-9);
        }
    }
}

TEST(CoordinateList, HeaderAndEntries) {
    std::ostringstream out;
    write_coordinate_list(out, build_bs_hamiltonian(MarketParams(0.05, 0.1), Grid1D(0, 1, 3),
                                                    BoundaryTag::DirichletZero));
    const auto text = out.str();
    EXPECT_EQ(text.rfind("row,col,value\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}
