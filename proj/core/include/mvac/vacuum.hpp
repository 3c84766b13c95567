#pragma once

// Vacuum conditions from the field expansion of the martingale state.
//
// Black-Scholes: writing e^x = Σφⁿ, each order must satisfy
//
//     V(φ) = −(σ²/2)n(n−1)φ^{n−2} + (σ²/2 − r)nφ^{n−1} + rφⁿ = 0.
//
// Merton-Garman: writing e^{x+y} = (Σφₓⁿ)(Σφ_yᵐ) gives a six-term polynomial
// in (φₓ, φ_y) at fixed log-variance y. The solvers below return the closed
// forms for each case and regime together with degeneracy and
// symmetry-breaking metadata.

#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "mvac/model.hpp"

namespace mvac {

enum class Regime {
    Exact,
    WeakField,
    StrongField,
    Extremum,
    StrongStrong,
    WeakWeak,
    StrongXWeakY,
    WeakXStrongY,
    Case,
};

std::string_view to_string(Regime r) noexcept;

enum class SymmetryStatus {
    Preserved,
    Broken,
    /// φₓφ_y = 0: one translation symmetry is broken and the other is not,
    /// without saying which.
    Exclusive,
};

std::string_view to_string(SymmetryStatus s) noexcept;

struct SymmetryVerdict {
    SymmetryStatus price = SymmetryStatus::Preserved;
    std::optional<SymmetryStatus> volatility;  ///< MG only
};

/// A vacuum value. An absent field is either irrelevant (BS has no φ_y) or
/// arbitrary (see the solution flags).
struct FieldPoint {
    std::optional<double> phi_x;
    std::optional<double> phi_y;
    int n = 0;
    std::optional<int> m;
};

/// Conic xx·φₓ² + xy·φₓφ_y + yy·φ_y² + x·φₓ + y·φ_y + c = 0, used when a
/// solution is a curve rather than isolated points.
struct FieldRelation {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
    double x = 0.0;
    double y = 0.0;
    double c = 0.0;

    double residual(double phi_x, double phi_y) const noexcept;
    /// Real φ_y on the curve at the given φₓ (empty if none; throws
    /// InvalidInput if every φ_y works).
    std::vector<double> solve_phi_y(double phi_x) const;
    std::vector<double> solve_phi_x(double phi_y) const;
};

struct VacuumSolution {
    Regime regime = Regime::Exact;
    int n = 0;
    std::optional<int> m;
    std::vector<FieldPoint> roots;
    /// Number of distinct nonzero isolated roots.
    std::size_t degeneracy = 0;
    SymmetryVerdict symmetry;

    bool approximate = false;
    bool no_real_solution = false;
    /// The reduced polynomial was obtained by dividing out φ^{n−2} (n ≥ 3),
    /// so φ = 0 also solves the undivided one.
    bool divided_out_trivial_root = false;
    bool phi_x_arbitrary = false;
    bool phi_y_arbitrary = false;
    /// Solutions form the curve in `relation` rather than isolated points.
    bool continuum = false;
    std::optional<FieldRelation> relation;
    /// y → ∞ limit of the nontrivial root, where the regime has one.
    std::optional<double> limit_value;

    std::vector<double> phi_x_values() const;
    std::vector<double> phi_y_values() const;
};

// --- Black-Scholes ---------------------------------------------------------

/// V(φ) as above. 0⁰ = 1; a term with zero coefficient is skipped. Throws
/// InvalidInput when a nonzero coefficient multiplies a negative power of φ = 0.
double bs_potential_residual(const MarketParams& p, int n, double phi);

/// Σ|terms| of V(φ), the scale for relative residual checks.
double bs_potential_scale(const MarketParams& p, int n, double phi);

/// rφ² + (σ²/2 − r)nφ − (σ²/2)n(n−1): V(φ)·φ^{2−n}, the quadratic whose
/// roots are the exact vacua (including φ = 0 at n = 1).
double bs_reduced_residual(const MarketParams& p, int n, double phi);
double bs_reduced_scale(const MarketParams& p, int n, double phi);

/// φ² + (σ²/2r − 1)(n−1)φ − (σ²/2r)(n−1)(n−2).
double bs_extremum_residual(const MarketParams& p, int n, double phi);

/// Both roots of the reduced quadratic; {0, 1 − σ²/2r} at n = 1, collapsing
/// to {0} when σ² = 2r. Throws InvalidInput for n < 1.
VacuumSolution bs_vacuum_exact(const MarketParams& p, int n);

/// φ ≈ σ²(n−1)/(σ² − 2r); 0 at n = 1. Throws SingularRegimeError at σ² = 2r
/// for n ≠ 1.
VacuumSolution bs_vacuum_weak(const MarketParams& p, int n);

/// {0, (1 − σ²/2r)n}, collapsing to {0} when σ² = 2r.
VacuumSolution bs_vacuum_strong(const MarketParams& p, int n);

/// Roots of dV/dφ = 0 in reduced form.
VacuumSolution bs_extremum_roots(const MarketParams& p, int n);

// --- Merton-Garman ---------------------------------------------------------

/// Six-term polynomial at (φₓ, φ_y, n, m) and log-variance y. A field may be
/// absent only when its order is 0. Power conventions as bs_potential_residual.
double mg_polynomial_residual(const MGParams& p, const FieldPoint& point, double y);
double mg_polynomial_scale(const MGParams& p, const FieldPoint& point, double y);

/// Closed-form cases (n, m) ∈ {(0,1), (1,0), (1,1)}; InvalidInput otherwise.
VacuumSolution mg_case_solver(const MGParams& p, double y, int n, int m);

/// Regime approximations: StrongStrong, WeakWeak, StrongXWeakY, WeakXStrongY.
/// WeakWeak needs phi_x (its roots scale with it). Poles raise
/// SingularRegimeError naming the offending condition.
VacuumSolution mg_regime_solver(const MGParams& p, double y, int n, int m, Regime regime,
                                std::optional<double> phi_x = std::nullopt);

// --- Information flow ------------------------------------------------------

/// Absolute tolerance of every Hermiticity flag.
inline constexpr double kFlagTol = 1e-12;

struct RegimeReport {
    std::variant<MarketParams, MGParams> params;
    std::optional<double> y;

    std::optional<bool> sigma_sq_is_2r;          ///< BS
    std::optional<double> volatility_drift;      ///< MG: λe^{−y} + μ − (ζ²/2)e^{2y(α−1)}
    std::optional<bool> volatility_drift_zero;   ///< MG
    std::optional<bool> variance_is_2r;          ///< MG: e^y = 2r

    bool information_preserved = false;
};

RegimeReport classify_information_flow(const MarketParams& p);
RegimeReport classify_information_flow(const MGParams& p, double y);

}  // namespace mvac
