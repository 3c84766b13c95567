#pragma once

// Crank-Nicolson time stepping of ∂ψ/∂τ = −Hψ (Euclidean, the pricing
// semigroup) and ∂ψ/∂τ = −iHψ (Unitary), plus option pricing on top of it.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mvac/model.hpp"
#include "mvac/operators.hpp"

namespace mvac {

enum class EvolutionMode { Euclidean, Unitary };

struct EvolutionConfig {
    double dt = 1e-3;
    std::size_t n_steps = 1;
    EvolutionMode mode = EvolutionMode::Euclidean;
    /// Euclidean only: the first k steps are each replaced by two implicit
    /// Euler half steps, which damps the payoff kink.
    std::size_t smoothing_steps = 0;
};

/// Value held on Dirichlet row `node` at elapsed time τ.
using DirichletValue = std::function<double(std::size_t node, double tau)>;

/// Per-step diagnostics. mass = Σψ·cell, norm = sqrt(Σ|ψ|²·cell).
struct FlowReport {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> norm;
    /// (final − initial)/|initial|; absolute change when the initial value is 0.
    double mass_drift = 0.0;
    double norm_drift = 0.0;
};

struct EvolutionResult {
    StateVector state;                     ///< real part
    std::optional<StateVector> imaginary;  ///< Unitary mode only
    FlowReport flow;
};

/// Throws InvalidInput for a bad config or a state on another grid, and
/// SingularSolveError when the step matrix cannot be factorized.
EvolutionResult evolve(const OperatorMatrix& op, const StateVector& state,
                       const EvolutionConfig& cfg, const DirichletValue& boundary = {});

class Payoff {
public:
    enum class Kind { Call, Put, Bond, MartingaleAsset, Tabulated };

    static Payoff call(double strike);
    static Payoff put(double strike);
    static Payoff bond();
    static Payoff asset();
    static Payoff tabulated(std::function<double(double)> rule);

    Kind kind() const noexcept { return kind_; }
    double strike() const noexcept { return strike_; }
    /// g(x) with x = ln S.
    double operator()(double x) const { return rule_(x); }

private:
    Payoff(Kind kind, double strike, std::function<double(double)> rule);

    Kind kind_;
    double strike_;
    std::function<double(double)> rule_;
};

struct PricingConfig {
    /// 0 picks T/1e-3 rounded up.
    std::size_t n_steps = 0;
    std::size_t smoothing_steps = 2;
};

/// Price curve C(0, x) over the grid for maturity T. Calls and puts use
/// Dirichlet far-field values; other payoffs use one-sided edge rows.
StateVector price_option(const MarketParams& p, const Payoff& payoff, double maturity,
                         const Grid1D& g, const PricingConfig& cfg = {});

/// Knock-out price curve; zero on the knocked-out region. Throws
/// InvalidInput unless the barrier is a barrier kind with a live interior node.
StateVector price_barrier(const MarketParams& p, const Payoff& payoff, const Potential& barrier,
                          double maturity, const Grid1D& g, const PricingConfig& cfg = {});

/// Linear interpolation of a price curve at spot s0.
double price_at_spot(const StateVector& curve, double s0);

struct KernelConfig {
    /// 0 picks the smallest count with dt ≤ h.
    std::size_t n_steps = 0;
    std::size_t smoothing_steps = 2;
};

/// Row x of the propagator e^{−τH_BS} as a density in x′: the discrete
/// delta at the node nearest x, divided by h, evolved under Hᵀ.
StateVector kernel_row(const MarketParams& p, double x, double tau, const Grid1D& g,
                       const KernelConfig& cfg = {});

}  // namespace mvac
