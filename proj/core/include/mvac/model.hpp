#pragma once

// Domain parameters and lattices shared by every other module.
//
// Units: rates are per year, time is in years. Prices enter only through
// the log-price coordinate x = ln S and the log-variance y = ln V.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace mvac {

/// Black-Scholes market: spot rate r and variance σ².
class MarketParams {
public:
    /// Tolerance of the Hermiticity test |σ² − 2r| ≤ kHermitianTol.
    static constexpr double kHermitianTol = 1e-12;

    /// Throws InvalidInput unless r > 0 and σ² ≥ 0.
    MarketParams(double r, double sigma_sq);

    double r() const noexcept { return r_; }
    double sigma_sq() const noexcept { return sigma_sq_; }
    double sigma() const noexcept;

    /// Coefficient of the first-derivative term, σ²/2 − r.
    double drift_coefficient() const noexcept { return 0.5 * sigma_sq_ - r_; }

    /// True iff σ² = 2r, the condition under which the BS Hamiltonian is symmetric.
    bool hermitian() const noexcept;

    friend bool operator==(const MarketParams&, const MarketParams&) = default;

private:
    double r_;
    double sigma_sq_;
};

/// Merton-Garman parameters. The market price of volatility risk is
/// absorbed in lambda.
struct MGParams {
    double r = 0.0;
    double lambda = 0.0;
    double mu = 0.0;
    double zeta = 0.0;
    double alpha = 1.0;
    double rho = 0.0;

    /// Throws InvalidInput unless −1 ≤ rho ≤ 1, zeta ≥ 0 and every field is finite.
    void validate() const;

    /// Volatility drift coefficient of the y-derivative term,
    /// λe^{−y} + μ − (ζ²/2)e^{2y(α−1)}. Vanishes when the Hamiltonian is
    /// Hermitian with respect to y.
    double volatility_drift(double y) const noexcept;

    /// Coefficient of the mixed derivative, ρζe^{y(α−1/2)}.
    double cross_coefficient(double y) const noexcept;

    /// Coefficient of the second y-derivative, ζ²e^{2y(α−1)}.
    double volatility_diffusion(double y) const noexcept;

    friend bool operator==(const MGParams&, const MGParams&) = default;
};

/// Physical-measure drift of the stock (the "expected return") on top of a
/// pricing model. Risk-neutral dynamics use expected_return = r.
struct SDEParams {
    double expected_return = 0.0;
    std::variant<MarketParams, MGParams> base;
};

/// Uniform lattice on [x_min, x_max] with n_points nodes.
class Grid1D {
public:
    /// Throws InvalidInput unless x_min < x_max, both finite, and n_points ≥ 3.
    Grid1D(double x_min, double x_max, std::size_t n_points);

    /// Log-price box ln s0 ± 6σ√T, the default truncation of the real line.
    static Grid1D centered_on_spot(double s0, double sigma_sq, double maturity,
                                   std::size_t n_points);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }
    double point(std::size_t i) const noexcept;
    std::vector<double> points() const;

    /// Index of the node nearest to x (clamped to the grid).
    std::size_t nearest_index(double x) const noexcept;

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double h_;
};

/// Tensor lattice over log-price x and log-variance y (σ² = e^y).
/// Nodes are flattened row-major with x outer: index = i·ny + j.
class Grid2D {
public:
    Grid2D(Grid1D x_axis, Grid1D y_axis) : x_(x_axis), y_(y_axis) {}

    const Grid1D& x_axis() const noexcept { return x_; }
    const Grid1D& y_axis() const noexcept { return y_; }
    std::size_t size() const noexcept { return x_.size() * y_.size(); }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * y_.size() + j; }

    /// Largest of the two spacings, used for grid-scaled tolerances.
    double spacing() const noexcept;

    friend bool operator==(const Grid2D&, const Grid2D&) = default;

private:
    Grid1D x_;
    Grid1D y_;
};

using GridRef = std::variant<Grid1D, Grid2D>;

std::size_t grid_size(const GridRef& grid) noexcept;
double grid_spacing(const GridRef& grid) noexcept;

/// Real field sampled on a grid. Length matches the grid and entries are finite.
class StateVector {
public:
    /// Throws InvalidInput on a length mismatch or a non-finite entry.
    StateVector(GridRef grid, std::vector<double> values);

    const GridRef& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// 1-D only: piecewise-linear interpolation at x inside the grid.
    double interpolate(double x) const;

    double max_abs() const noexcept;

private:
    GridRef grid_;
    std::vector<double> values_;
};

/// The martingale state S = e^x sampled on the grid.
StateVector sample_martingale_state(const Grid1D& grid);

/// The extended martingale state S = e^{x+y}, row-major with x outer.
StateVector sample_extended_martingale_state(const Grid2D& grid);

}  // namespace mvac
