#include "mvac/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "mvac/errors.hpp"
#include "mvac/io.hpp"
#include "mvac/sde.hpp"

namespace mvac {
namespace {

double cell_volume(const GridRef& g) {
    if (const auto* g1 = std::get_if<Grid1D>(&g)) return g1->spacing();
    const auto& g2 = std::get<Grid2D>(g);
    return g2.x_axis().spacing() * g2.y_axis().spacing();
}

MartingaleReport summarize(const OperatorMatrix& op, const StateVector& state, double tol,
                           std::span<const std::size_t> rows) {
    if (!(op.grid() == state.grid())) {
        throw InvalidInput("martingale_residual: operator and state live on different grids");
    }
    if (!(tol >= 0.0)) throw InvalidInput("martingale_residual: tolerance must be nonnegative");
    const auto& m = op.matrix();
    const auto u = state.values();
    MartingaleReport rep;
    rep.h = grid_spacing(op.grid());
    rep.tolerance = tol;
    double sum_sq = 0.0;
    for (std::size_t i : rows) {
        double acc = 0.0;
        for (OperatorMatrix::Sparse::InnerIterator it(m, static_cast<Eigen::Index>(i)); it; ++it) {
            acc += it.value() * u[static_cast<std::size_t>(it.col())];
        }
        rep.residual_max = std::max(rep.residual_max, std::abs(acc));
        sum_sq += acc * acc;
    }
    rep.rows_checked = rows.size();
    rep.residual_l2 = std::sqrt(sum_sq * cell_volume(op.grid()));
    rep.pass = rep.residual_max <= tol;
    return rep;
}

McMartingaleResult finish(const std::vector<double>& discounted, double s0) {
    const auto n = static_cast<double>(discounted.size());
    double sum = 0.0;
    for (double d : discounted) sum += d - s0;
    const double mean = sum / n;
    double ss = 0.0;
    for (double d : discounted) {
        const double dev = (d - s0) - mean;
        ss += dev * dev;
    }
    McMartingaleResult res;
    res.statistic = mean;
    res.standard_error = std::sqrt(ss / (n - 1.0) / n);
    res.n_paths = discounted.size();
    return res;
}

void validate_mc(double s0, double horizon, std::size_t n_paths) {
    if (!(s0 > 0.0) || !std::isfinite(s0)) throw InvalidInput("s0 must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidInput("horizon must be positive");
    if (n_paths < kMinMcPaths) {
        throw InvalidInput("n_paths must be at least " + std::to_string(kMinMcPaths));
    }
}

}  // namespace

double grid_scaled_tolerance(const StateVector& state) {
    const double h = grid_spacing(state.grid());
    return 10.0 * h * h * state.max_abs();
}

MartingaleReport martingale_residual(const OperatorMatrix& op, const StateVector& state,
                                     double tol) {
    const auto rows = op.interior_indices();
    return summarize(op, state, tol, rows);
}

MartingaleReport martingale_residual(const OperatorMatrix& op, const StateVector& state,
                                     double tol, std::span<const std::size_t> rows) {
    for (std::size_t i : rows) {
        if (i >= op.size() || !op.is_interior(i)) {
            throw InvalidInput("martingale_residual: row " + std::to_string(i) +
                               " is not an interior row");
        }
    }
    return summarize(op, state, tol, rows);
}

double extended_constraint_residual(const MGParams& p, double y) {
    const double ey = std::exp(y);
    double inner = p.mu;
    if (p.zeta != 0.0) {
        inner += 0.5 * p.zeta * p.zeta * std::exp(2.0 * y * (p.alpha - 1.0));
        if (p.rho != 0.0) inner += p.rho * p.zeta * std::exp(y * (p.alpha - 0.5));
    }
    return p.lambda + ey * inner;
}

ConstraintRoot solve_extended_constraint(const MGParams& p, double y_lo, double y_hi) {
    p.validate();
    if (!std::isfinite(y_lo) || !std::isfinite(y_hi) || !(y_lo < y_hi)) {
        throw InvalidInput("solve_extended_constraint: need finite y_lo < y_hi");
    }
    auto f = [&p](double y) { return extended_constraint_residual(p, y); };
    const double f_lo = f(y_lo);
    const double f_hi = f(y_hi);
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi)) {
        throw InvalidInput("solve_extended_constraint: residual not finite at the bracket ends");
    }

    ConstraintRoot root;
    root.bracket_lo = y_lo;
    root.bracket_hi = y_hi;
    if (f_lo == 0.0 || f_hi == 0.0) {
        root.y_star = f_lo == 0.0 ? y_lo : y_hi;
        return root;
    }
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw NoRootError("no sign change of the constraint on [" + format_number(y_lo) + ", " +
                          format_number(y_hi) + "]: residuals " + format_number(f_lo) + " and " +
                          format_number(f_hi));
    }

    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, y_lo, y_hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
    const double fa = f(a);
    const double fb = f(b);
    root.y_star = std::abs(fa) <= std::abs(fb) ? a : b;
    root.residual = std::abs(fa) <= std::abs(fb) ? fa : fb;
    root.iterations = static_cast<int>(iters);
    return root;
}

ConsistencyReport hermitian_extended_consistency(const MGParams& p) {
    p.validate();
    ConsistencyReport rep;
    if (p.zeta == 0.0) {
        rep.kind = ConsistencyReport::Kind::Degenerate;
        return rep;
    }
    if (p.alpha == 1.5) {
        rep.kind = ConsistencyReport::Kind::ParameterIdentity;
        rep.identity_residual = p.zeta + p.rho;
        rep.identity_holds = std::abs(rep.identity_residual) <= 1e-12;
        return rep;
    }
    const double ratio = -p.rho / p.zeta;
    if (!(ratio > 0.0)) {
        rep.kind = ConsistencyReport::Kind::NoSolution;
        return rep;
    }
    rep.kind = ConsistencyReport::Kind::YRoot;
    rep.y = std::log(ratio) / (p.alpha - 1.5);
    return rep;
}

bool McMartingaleResult::passes() const noexcept {
    return std::abs(statistic) <= 3.0 * standard_error;
}

McMartingaleResult mc_martingale_check(const SDEParams& sp, double s0, double horizon,
                                       std::size_t n_paths, std::uint64_t seed,
                                       unsigned workers) {
    validate_mc(s0, horizon, n_paths);
    const auto* market = std::get_if<MarketParams>(&sp.base);
    if (market == nullptr) throw InvalidInput("mc_martingale_check: base must be MarketParams");

    const double sigma_sqrt_t = market->sigma() * std::sqrt(horizon);
    const double log_drift =
        (sp.expected_return - market->r() - 0.5 * market->sigma_sq()) * horizon;
    std::vector<double> discounted(n_paths);
    parallel_for(n_paths, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            NormalStream z(seed, p);
            discounted[p] = s0 * std::exp(log_drift + sigma_sqrt_t * z.next());
        }
    });
    return finish(discounted, s0);
}

McMartingaleResult mc_martingale_check_mg(const MGParams& p, double drift, double s0, double v0,
                                          double horizon, double dt, std::size_t n_paths,
                                          std::uint64_t seed, unsigned workers) {
    p.validate();
    validate_mc(s0, horizon, n_paths);
    if (!(v0 > 0.0)) throw InvalidInput("v0 must be positive");
    const std::size_t steps = step_count(horizon, dt);
    const MGStepper stepper(p, drift, horizon / static_cast<double>(steps));
    const double log_discount = -p.r * horizon;
    std::vector<double> discounted(n_paths);
    parallel_for(n_paths, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t path = b; path < e; ++path) {
            NormalStream z(seed, path);
            MGStepper::State st{std::log(s0), v0};
            for (std::size_t k = 0; k < steps; ++k) stepper.advance(st, z);
            discounted[path] = std::exp(st.log_s + log_discount);
        }
    });
    return finish(discounted, s0);
}

}  // namespace mvac
