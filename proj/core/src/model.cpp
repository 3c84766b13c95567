#include "mvac/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvac/errors.hpp"

namespace mvac {

MarketParams::MarketParams(double r, double sigma_sq) : r_(r), sigma_sq_(sigma_sq) {
    if (!std::isfinite(r) || !(r > 0.0)) {
        throw InvalidInput("MarketParams: r must be positive, got " + std::to_string(r));
    }
    if (!std::isfinite(sigma_sq) || sigma_sq < 0.0) {
        throw InvalidInput("MarketParams: sigma_sq must be nonnegative, got " +
                           std::to_string(sigma_sq));
    }
}

double MarketParams::sigma() const noexcept { return std::sqrt(sigma_sq_); }

bool MarketParams::hermitian() const noexcept {
    return std::abs(sigma_sq_ - 2.0 * r_) <= kHermitianTol;
}

void MGParams::validate() const {
    for (double v : {r, lambda, mu, zeta, alpha, rho}) {
        if (!std::isfinite(v)) throw InvalidInput("MGParams: non-finite parameter");
    }
    if (rho < -1.0 || rho > 1.0) {
        throw InvalidInput("MGParams: rho must lie in [-1, 1], got " + std::to_string(rho));
    }
    if (zeta < 0.0) {
        throw InvalidInput("MGParams: zeta must be nonnegative, got " + std::to_string(zeta));
    }
}

double MGParams::volatility_drift(double y) const noexcept {
    return lambda * std::exp(-y) + mu - 0.5 * zeta * zeta * std::exp(2.0 * y * (alpha - 1.0));
}

double MGParams::cross_coefficient(double y) const noexcept {
    return rho * zeta * std::exp(y * (alpha - 0.5));
}

double MGParams::volatility_diffusion(double y) const noexcept {
    return zeta * zeta * std::exp(2.0 * y * (alpha - 1.0));
}

Grid1D::Grid1D(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), h_(0.0) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
        throw InvalidInput("Grid1D: need finite x_min < x_max");
    }
    if (n_points < 3) throw InvalidInput("Grid1D: need at least 3 points");
    h_ = (x_max - x_min) / static_cast<double>(n_points - 1);
}

Grid1D Grid1D::centered_on_spot(double s0, double sigma_sq, double maturity,
                                std::size_t n_points) {
    if (!(s0 > 0.0) || !(maturity > 0.0) || !(sigma_sq > 0.0)) {
        throw InvalidInput("Grid1D::centered_on_spot: need s0 > 0, sigma_sq > 0, maturity > 0");
    }
    const double half_width = 6.0 * std::sqrt(sigma_sq * maturity);
    const double x0 = std::log(s0);
    return Grid1D(x0 - half_width, x0 + half_width, n_points);
}

double Grid1D::point(std::size_t i) const noexcept {
    if (i + 1 == n_) return x_max_;
    return x_min_ + static_cast<double>(i) * h_;
}

std::vector<double> Grid1D::points() const {
    std::vector<double> xs(n_);
    for (std::size_t i = 0; i < n_; ++i) xs[i] = point(i);
    return xs;
}

std::size_t Grid1D::nearest_index(double x) const noexcept {
    const double t = std::round((x - x_min_) / h_);
    if (!(t > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(t), n_ - 1);
}

double Grid2D::spacing() const noexcept { return std::max(x_.spacing(), y_.spacing()); }

std::size_t grid_size(const GridRef& grid) noexcept {
    return std::visit([](const auto& g) { return g.size(); }, grid);
}

double grid_spacing(const GridRef& grid) noexcept {
    return std::visit([](const auto& g) { return g.spacing(); }, grid);
}

StateVector::StateVector(GridRef grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_size(grid_)) {
        throw InvalidInput("StateVector: length " + std::to_string(values_.size()) +
                           " does not match grid size " + std::to_string(grid_size(grid_)));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidInput("StateVector: non-finite entry");
    }
}

double StateVector::interpolate(double x) const {
    const auto* g = std::get_if<Grid1D>(&grid_);
    if (g == nullptr) throw InvalidInput("StateVector::interpolate: 1-D grids only");
    if (x < g->x_min() || x > g->x_max()) {
        throw InvalidInput("StateVector::interpolate: point outside grid");
    }
    const double t = (x - g->x_min()) / g->spacing();
    const auto i = std::min(static_cast<std::size_t>(t), g->size() - 2);
    const double w = t - static_cast<double>(i);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double StateVector::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

StateVector sample_martingale_state(const Grid1D& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = std::exp(grid.point(i));
    return StateVector(grid, std::move(v));
}

StateVector sample_extended_martingale_state(const Grid2D& grid) {
    const auto& gx = grid.x_axis();
    const auto& gy = grid.y_axis();
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < gx.size(); ++i) {
        for (std::size_t j = 0; j < gy.size(); ++j) {
            v[grid.index(i, j)] = std::exp(gx.point(i) + gy.point(j));
        }
    }
    return StateVector(grid, std::move(v));
}

}  // namespace mvac
