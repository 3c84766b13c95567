#pragma once

// The martingale condition in three forms: a Hamiltonian annihilating the
// martingale state, the Merton-Garman parameter constraint for the extended
// state e^{x+y}, and a Monte Carlo expectation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "mvac/model.hpp"
#include "mvac/operators.hpp"

namespace mvac {

struct MartingaleReport {
    double residual_max = 0.0;
    /// sqrt(Σ residual² · cell volume) over the checked rows.
    double residual_l2 = 0.0;
    double h = 0.0;
    double tolerance = 0.0;
    std::size_t rows_checked = 0;
    bool pass = false;
};

/// 10·h²·max|state|, the default annihilation tolerance.
double grid_scaled_tolerance(const StateVector& state);

/// Residual of op·state over interior rows. Throws InvalidInput if op and
/// state live on different grids.
MartingaleReport martingale_residual(const OperatorMatrix& op, const StateVector& state,
                                     double tol);

/// Same, restricted to the listed rows (each must be an interior row).
MartingaleReport martingale_residual(const OperatorMatrix& op, const StateVector& state,
                                     double tol, std::span<const std::size_t> rows);

/// λ + e^y(μ + (ζ²/2)e^{2y(α−1)} + ρζe^{y(α−1/2)}); zero where the MG
/// Hamiltonian annihilates e^{x+y}.
double extended_constraint_residual(const MGParams& p, double y);

struct ConstraintRoot {
    double y_star = 0.0;
    double residual = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
};

/// Bracketed root of extended_constraint_residual (TOMS 748). Throws
/// NoRootError when the bracket ends share a sign, InvalidInput for a bad bracket.
ConstraintRoot solve_extended_constraint(const MGParams& p, double y_lo, double y_hi);

/// What remains of the constraint once the volatility-drift term also vanishes.
/// Both together require e^{y(α−3/2)} = −ρ/ζ.
struct ConsistencyReport {
    enum class Kind {
        YRoot,              ///< a unique y solves both
        ParameterIdentity,  ///< α = 3/2: y drops out, leaving ζ + ρ = 0
        Degenerate,         ///< ζ = 0: the two conditions coincide
        NoSolution,         ///< −ρ/ζ ≤ 0
    };
    Kind kind = Kind::NoSolution;
    std::optional<double> y;
    /// ζ + ρ for ParameterIdentity, otherwise 0.
    double identity_residual = 0.0;
    bool identity_holds = false;
};

ConsistencyReport hermitian_extended_consistency(const MGParams& p);

struct McMartingaleResult {
    double statistic = 0.0;       ///< mean of e^{−rT}S_T minus s0
    double standard_error = 0.0;
    std::size_t n_paths = 0;

    /// |statistic| ≤ 3·SE
    bool passes() const noexcept;
};

inline constexpr std::size_t kMinMcPaths = 1000;

/// GBM check with one exact log step. Base must be MarketParams.
McMartingaleResult mc_martingale_check(const SDEParams& sp, double s0, double horizon,
                                       std::size_t n_paths, std::uint64_t seed,
                                       unsigned workers = 0);

/// Merton-Garman check, streaming Euler paths with step dt.
McMartingaleResult mc_martingale_check_mg(const MGParams& p, double drift, double s0, double v0,
                                          double horizon, double dt, std::size_t n_paths,
                                          std::uint64_t seed, unsigned workers = 0);

}  // namespace mvac
