#pragma once

// Discretized financial Hamiltonians.
//
// Every 1-D operator has the shape
//
//     H = −(σ²/2)∂²ₓ + (σ²/2 − V(x))∂ₓ + V(x)
//
// with V ≡ r for plain Black-Scholes. Interior rows use second-order central
// differences. Edge rows either use second-order one-sided stencils or are
// Dirichlet rows (stored as zero rows and held at a prescribed value by the
// time stepper). Barrier potentials turn every knocked-out node into a
// Dirichlet row.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "mvac/model.hpp"

namespace mvac {

enum class BoundaryTag { OneSided, DirichletZero };

enum class RowKind : std::uint8_t {
    Interior,   ///< central-difference stencil
    Boundary,   ///< one-sided closure at a grid edge
    Dirichlet,  ///< zero row; value prescribed externally
};

class OperatorMatrix {
public:
    using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    /// Throws InvalidInput if the matrix is not square, does not match the grid,
    /// or holds a non-finite entry.
    OperatorMatrix(GridRef grid, Sparse matrix, std::vector<RowKind> rows, BoundaryTag tag);

    const GridRef& grid() const noexcept { return grid_; }
    const Sparse& matrix() const noexcept { return m_; }
    std::span<const RowKind> row_kinds() const noexcept { return rows_; }
    BoundaryTag boundary() const noexcept { return tag_; }
    std::size_t size() const noexcept { return rows_.size(); }

    bool is_interior(std::size_t i) const noexcept { return rows_[i] == RowKind::Interior; }
    bool has_dirichlet_rows() const noexcept;
    std::vector<std::size_t> interior_indices() const;

    double coeff(std::size_t i, std::size_t j) const { return m_.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); }

    std::vector<double> apply(std::span<const double> u) const;

    /// Dense copy of the interior × interior block.
    Eigen::MatrixXd interior_block() const;

    /// Copy with the listed rows replaced by Dirichlet rows.
    OperatorMatrix with_dirichlet_rows(std::span<const std::size_t> rows) const;

    /// Transpose; used to propagate kernel rows. Rejects operators with Dirichlet rows.
    OperatorMatrix transposed() const;

private:
    GridRef grid_;
    Sparse m_;
    std::vector<RowKind> rows_;
    BoundaryTag tag_;
};

/// Non-derivative term added to a financial Hamiltonian.
///
/// Constant and Tabulated kinds give the full rate V(x) entering
/// −(σ²/2)∂² + (σ²/2 − V)∂ + V. Barrier kinds describe an extra potential
/// on top of the Black-Scholes rate: zero on the live region and +∞ on the
/// knocked-out region, which is open (x < level, or outside [lo, hi]).
class Potential {
public:
    enum class Kind { Constant, DownAndOutBarrier, DoubleKnockOut, Tabulated };

    static Potential constant(double value);
    static Potential down_and_out(double level);
    /// Throws InvalidInput unless lo < hi.
    static Potential double_knock_out(double lo, double hi);
    /// Piecewise-linear interpolation of (xs, values); xs strictly increasing.
    static Potential tabulated(std::vector<double> xs, std::vector<double> values);
    static Potential tabulated(std::function<double(double)> rule);

    Kind kind() const noexcept { return kind_; }
    bool is_barrier() const noexcept;
    double operator()(double x) const { return rule_(x); }

    /// True on the knocked-out region of a barrier kind; false otherwise.
    bool knocked_out(double x) const noexcept;

    double level() const noexcept { return lo_; }
    double lower() const noexcept { return lo_; }
    double upper() const noexcept { return hi_; }

private:
    Potential(Kind kind, std::function<double(double)> rule, double lo, double hi);

    Kind kind_;
    std::function<double(double)> rule_;
    double lo_;
    double hi_;
};

/// Gauge data of the map H_eff = e^{s} H_herm e^{−s}.
struct SimilarityTransform {
    /// Continuum gauge s(x) = x/2 − (1/σ²)∫V, integral by the trapezoid rule
    /// from 0 (or from x_min when 0 lies outside the grid).
    StateVector s_values;
    /// Discrete gauge that makes the interior block exactly symmetric. Agrees
    /// with s_values to O(h²).
    std::vector<double> discrete_gauge;
    /// (1/2σ²)(r + σ²/2)²
    double gamma;
    /// (1/σ²)(σ²/2 − r)
    double alpha_coef;
};

struct SimilarityResult {
    SimilarityTransform transform;
    OperatorMatrix hermitian;
};

OperatorMatrix build_bs_hamiltonian(const MarketParams& p, const Grid1D& g,
                                    BoundaryTag tag = BoundaryTag::OneSided);

/// Six-term Merton-Garman Hamiltonian on the (x, y) lattice with the
/// four-point cross stencil for ∂²/∂x∂y. Edge nodes are Dirichlet rows.
OperatorMatrix build_mg_hamiltonian(const MGParams& p, const Grid2D& g);

/// −(σ²/2)∂² + (σ²/2 − V)∂ + V. For barrier kinds V = r on the live region
/// and knocked-out nodes become Dirichlet rows.
OperatorMatrix build_effective_bs(const MarketParams& p, const Potential& v, const Grid1D& g,
                                  BoundaryTag tag = BoundaryTag::OneSided);

/// Black-Scholes operator restricted to the corridor of a DoubleKnockOut potential.
OperatorMatrix build_double_knockout(const MarketParams& p, const Potential& v,
                                     const Grid1D& g);

/// Largest |M_ij − M_ji|/2 over the interior × interior block.
double hermiticity_defect(const OperatorMatrix& op);

/// Gauge functions plus the symmetric operator similar to build_effective_bs(p, v, g).
/// Throws InvalidInput for σ² = 0 or when the grid is too coarse for the
/// drift (a sign change in an off-diagonal pair).
SimilarityResult similarity_transform(const MarketParams& p, const Potential& v, const Grid1D& g);

/// Direct central-difference discretization of −(σ²/2)∂² + ½V′ + (1/2σ²)(V + σ²/2)².
/// Second route to the Hermitian operator, used for cross-checks.
OperatorMatrix build_hermitian_direct(const MarketParams& p, const Potential& v, const Grid1D& g);

/// Price-translation generator: ∂ₓ of the state, central in the interior and
/// second-order one-sided at the edges.
StateVector apply_momentum(const StateVector& state, const Grid1D& g);

enum class Axis { X, Y };

/// ∂ₓ or ∂ᵧ of a state on a 2-D lattice.
StateVector apply_momentum(const StateVector& state, const Grid2D& g, Axis axis);

/// "row,col,value" lines, row-major, with a header line.
void write_coordinate_list(std::ostream& out, const OperatorMatrix& op);

}  // namespace mvac
