#include "mvac/evolution.hpp"

#include <cmath>
#include <complex>

#include <Eigen/SparseLU>

#include "mvac/errors.hpp"

namespace mvac {
namespace {

using Complex = std::complex<double>;

double cell_volume(const GridRef& g) {
    if (const auto* g1 = std::get_if<Grid1D>(&g)) return g1->spacing();
    const auto& g2 = std::get<Grid2D>(g);
    return g2.x_axis().spacing() * g2.y_axis().spacing();
}

double drift_fraction(const std::vector<double>& series) {
    const double first = series.front();
    const double change = series.back() - first;
    return first != 0.0 ? change / std::abs(first) : change;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> shifted_identity(const OperatorMatrix& op, Scalar factor) {
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::SparseMatrix<Scalar> m = op.matrix().template cast<Scalar>() * factor;
    Eigen::SparseMatrix<Scalar> id(n, n);
    id.setIdentity();
    m = id + m;
    m.makeCompressed();
    return m;
}

template <typename Scalar>
void record(FlowReport& flow, double t, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& u,
            double cell) {
    double mass = 0.0;
    double sq = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        mass += std::real(u[i]);
        sq += std::norm(u[i]);
    }
    flow.times.push_back(t);
    flow.mass.push_back(mass * cell);
    flow.norm.push_back(std::sqrt(sq * cell));
}

template <typename Solver>
void check_factorization(const Solver& s) {
    if (s.info() != Eigen::Success) {
        throw SingularSolveError("time-step matrix is singular");
    }
}

template <typename Vec>
void check_finite(const Vec& u) {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (!std::isfinite(std::abs(u[i]))) {
            throw SingularSolveError("time step produced a non-finite value");
        }
    }
}

std::vector<std::size_t> dirichlet_nodes(const OperatorMatrix& op) {
    std::vector<std::size_t> nodes;
    const auto kinds = op.row_kinds();
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (kinds[i] == RowKind::Dirichlet) nodes.push_back(i);
    }
    return nodes;
}

EvolutionResult evolve_euclidean(const OperatorMatrix& op, const StateVector& state,
                                 const EvolutionConfig& cfg, const DirichletValue& boundary) {
    const auto nodes = dirichlet_nodes(op);
    const double cell = cell_volume(op.grid());
    auto hold = [&](Eigen::VectorXd& v, double tau) {
        for (std::size_t i : nodes) {
            v[static_cast<Eigen::Index>(i)] = boundary ? boundary(i, tau) : 0.0;
        }
    };

    // I + (dt/2)H serves both the Crank-Nicolson step and the implicit Euler half step.
    const auto implicit = shifted_identity<double>(op, 0.5 * cfg.dt);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(implicit);
    check_factorization(lu);
    const OperatorMatrix::Sparse& h = op.matrix();

    Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(state.values().data(),
                                                          static_cast<Eigen::Index>(state.size()));
    FlowReport flow;
    record(flow, 0.0, u, cell);
    for (std::size_t k = 0; k < cfg.n_steps; ++k) {
        const double t0 = cfg.dt * static_cast<double>(k);
        const double t1 = cfg.dt * static_cast<double>(k + 1);
        if (k < cfg.smoothing_steps) {
            Eigen::VectorXd rhs = u;
            hold(rhs, t0 + 0.5 * cfg.dt);
            u = lu.solve(rhs);
            rhs = u;
            hold(rhs, t1);
            u = lu.solve(rhs);
        } else {
            Eigen::VectorXd rhs = u - (0.5 * cfg.dt) * (h * u);
            hold(rhs, t1);
            u = lu.solve(rhs);
        }
        check_factorization(lu);
        check_finite(u);
        record(flow, t1, u, cell);
    }
    flow.mass_drift = drift_fraction(flow.mass);
    flow.norm_drift = drift_fraction(flow.norm);
    return {StateVector(op.grid(), std::vector<double>(u.data(), u.data() + u.size())),
            std::nullopt, std::move(flow)};
}

EvolutionResult evolve_unitary(const OperatorMatrix& op, const StateVector& state,
                               const EvolutionConfig& cfg, const DirichletValue& boundary) {
    const auto nodes = dirichlet_nodes(op);
    const double cell = cell_volume(op.grid());
    const Complex half_step(0.0, 0.5 * cfg.dt);

    const auto implicit = shifted_identity<Complex>(op, half_step);
    const Eigen::SparseMatrix<Complex> explicit_part =
        shifted_identity<Complex>(op, -half_step);
    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
    lu.compute(implicit);
    check_factorization(lu);

    Eigen::VectorXcd u(static_cast<Eigen::Index>(state.size()));
    for (std::size_t i = 0; i < state.size(); ++i) u[static_cast<Eigen::Index>(i)] = state[i];
    FlowReport flow;
    record(flow, 0.0, u, cell);
    for (std::size_t k = 0; k < cfg.n_steps; ++k) {
        const double t1 = cfg.dt * static_cast<double>(k + 1);
        Eigen::VectorXcd rhs = explicit_part * u;
        for (std::size_t i : nodes) {
            rhs[static_cast<Eigen::Index>(i)] = boundary ? boundary(i, t1) : 0.0;
        }
        u = lu.solve(rhs);
        check_finite(u);
        record(flow, t1, u, cell);
    }
    flow.mass_drift = drift_fraction(flow.mass);
    flow.norm_drift = drift_fraction(flow.norm);

    std::vector<double> re(state.size());
    std::vector<double> im(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        re[i] = u[static_cast<Eigen::Index>(i)].real();
        im[i] = u[static_cast<Eigen::Index>(i)].imag();
    }
    return {StateVector(op.grid(), std::move(re)), StateVector(op.grid(), std::move(im)),
            std::move(flow)};
}

std::size_t pricing_steps(double maturity, const PricingConfig& cfg) {
    if (cfg.n_steps > 0) return cfg.n_steps;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(maturity / 1e-3 - 1e-9)));
}

void validate_maturity(double maturity) {
    if (!(maturity > 0.0) || !std::isfinite(maturity)) {
        throw InvalidInput("maturity must be positive");
    }
}

std::vector<double> sample_payoff(const Payoff& payoff, const Grid1D& g) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        v[i] = payoff(g.point(i));
        if (!std::isfinite(v[i])) throw InvalidInput("payoff is not finite on the grid");
    }
    return v;
}

/// Far-field Dirichlet values of vanilla calls and puts.
DirichletValue far_field(const MarketParams& p, const Payoff& payoff, const Grid1D& g) {
    const double k = payoff.strike();
    const double r = p.r();
    const double s_lo = std::exp(g.x_min());
    const double s_hi = std::exp(g.x_max());
    const std::size_t last = g.size() - 1;
    if (payoff.kind() == Payoff::Kind::Call) {
        return [=](std::size_t node, double tau) {
            return node == last ? s_hi - k * std::exp(-r * tau) : 0.0;
        };
    }
    return [=](std::size_t node, double tau) {
        return node == 0 ? k * std::exp(-r * tau) - s_lo : 0.0;
    };
}

bool uses_far_field(const Payoff& payoff) {
    return payoff.kind() == Payoff::Kind::Call || payoff.kind() == Payoff::Kind::Put;
}

}  // namespace

EvolutionResult evolve(const OperatorMatrix& op, const StateVector& state,
                       const EvolutionConfig& cfg, const DirichletValue& boundary) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw InvalidInput("evolve: dt must be positive");
    if (cfg.n_steps < 1) throw InvalidInput("evolve: n_steps must be at least 1");
    if (!(op.grid() == state.grid())) {
        throw InvalidInput("evolve: operator and state live on different grids");
    }
    if (cfg.mode == EvolutionMode::Unitary) return evolve_unitary(op, state, cfg, boundary);
    return evolve_euclidean(op, state, cfg, boundary);
}

Payoff::Payoff(Kind kind, double strike, std::function<double(double)> rule)
    : kind_(kind), strike_(strike), rule_(std::move(rule)) {}

Payoff Payoff::call(double strike) {
    if (!(strike >= 0.0) || !std::isfinite(strike)) throw InvalidInput("strike must be >= 0");
    return Payoff(Kind::Call, strike, [strike](double x) { return std::max(std::exp(x) - strike, 0.0); });
}

Payoff Payoff::put(double strike) {
    if (!(strike >= 0.0) || !std::isfinite(strike)) throw InvalidInput("strike must be >= 0");
    return Payoff(Kind::Put, strike, [strike](double x) { return std::max(strike - std::exp(x), 0.0); });
}

Payoff Payoff::bond() {
    return Payoff(Kind::Bond, 0.0, [](double) { return 1.0; });
}

Payoff Payoff::asset() {
    return Payoff(Kind::MartingaleAsset, 0.0, [](double x) { return std::exp(x); });
}

Payoff Payoff::tabulated(std::function<double(double)> rule) {
    if (!rule) throw InvalidInput("Payoff::tabulated: empty rule");
    return Payoff(Kind::Tabulated, 0.0, std::move(rule));
}

StateVector price_option(const MarketParams& p, const Payoff& payoff, double maturity,
                         const Grid1D& g, const PricingConfig& cfg) {
    validate_maturity(maturity);
    const bool far = uses_far_field(payoff);
    const auto op = build_bs_hamiltonian(p, g, far ? BoundaryTag::DirichletZero : BoundaryTag::OneSided);
    const std::size_t steps = pricing_steps(maturity, cfg);
    EvolutionConfig ec{maturity / static_cast<double>(steps), steps, EvolutionMode::Euclidean,
                       std::min(cfg.smoothing_steps, steps)};
    DirichletValue bc;
    if (far) bc = far_field(p, payoff, g);
    return evolve(op, StateVector(g, sample_payoff(payoff, g)), ec, bc).state;
}

StateVector price_barrier(const MarketParams& p, const Payoff& payoff, const Potential& barrier,
                          double maturity, const Grid1D& g, const PricingConfig& cfg) {
    validate_maturity(maturity);
    if (!barrier.is_barrier()) throw InvalidInput("price_barrier: potential is not a barrier");
    const bool far = uses_far_field(payoff);
    const auto op =
        build_effective_bs(p, barrier, g, far ? BoundaryTag::DirichletZero : BoundaryTag::OneSided);
    if (op.interior_indices().empty()) {
        throw InvalidInput("price_barrier: no live interior node between the barriers");
    }

    auto initial = sample_payoff(payoff, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (barrier.knocked_out(g.point(i))) initial[i] = 0.0;
    }
    DirichletValue vanilla;
    if (far) vanilla = far_field(p, payoff, g);
    DirichletValue bc = [&](std::size_t node, double tau) {
        if (barrier.knocked_out(g.point(node))) return 0.0;
        return vanilla ? vanilla(node, tau) : 0.0;
    };

    const std::size_t steps = pricing_steps(maturity, cfg);
    EvolutionConfig ec{maturity / static_cast<double>(steps), steps, EvolutionMode::Euclidean,
                       std::min(cfg.smoothing_steps, steps)};
    return evolve(op, StateVector(g, std::move(initial)), ec, bc).state;
}

double price_at_spot(const StateVector& curve, double s0) {
    if (!(s0 > 0.0)) throw InvalidInput("spot must be positive");
    return curve.interpolate(std::log(s0));
}

StateVector kernel_row(const MarketParams& p, double x, double tau, const Grid1D& g,
                       const KernelConfig& cfg) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidInput("kernel_row: tau must be positive");
    if (!std::isfinite(x)) throw InvalidInput("kernel_row: x must be finite");
    const auto op = build_bs_hamiltonian(p, g, BoundaryTag::OneSided).transposed();
    const std::size_t steps =
        cfg.n_steps > 0 ? cfg.n_steps
                        : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                       std::ceil(tau / g.spacing() - 1e-9)));
    std::vector<double> delta(g.size(), 0.0);
    delta[g.nearest_index(x)] = 1.0 / g.spacing();
    EvolutionConfig ec{tau / static_cast<double>(steps), steps, EvolutionMode::Euclidean,
                       std::min(cfg.smoothing_steps, steps)};
    return evolve(op, StateVector(g, std::move(delta)), ec).state;
}

}  // namespace mvac
