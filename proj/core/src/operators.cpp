#include "mvac/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "mvac/errors.hpp"
#include "mvac/io.hpp"

namespace mvac {
namespace {

using Triplet = Eigen::Triplet<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Second-order one-sided stencils at the left edge; the right edge mirrors
// them (the first-derivative weights flip sign).
constexpr double kOneSidedD2[4] = {2.0, -5.0, 4.0, -1.0};
constexpr double kOneSidedD1[3] = {-3.0, 4.0, -1.0};

/// Row-wise coefficients of −(σ²/2)∂² + b(x)∂ + c(x).
struct Coefficients1D {
    double diffusion;            // multiplies ∂² (already carries the minus sign)
    std::vector<double> drift;   // multiplies ∂
    std::vector<double> rate;    // multiplies the identity
};

OperatorMatrix assemble_1d(const Grid1D& g, const Coefficients1D& c, std::vector<RowKind> kinds,
                           BoundaryTag tag) {
    const std::size_t n = g.size();
    const double h = g.spacing();
    const double h2 = h * h;
    std::vector<Triplet> t;
    t.reserve(3 * n + 8);

    auto add = [&t](std::size_t i, std::size_t j, double v) {
        if (v != 0.0) t.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    };

    for (std::size_t i = 0; i < n; ++i) {
        const double a = c.diffusion;
        const double b = c.drift[i];
        switch (kinds[i]) {
            case RowKind::Dirichlet:
                break;
            case RowKind::Interior:
                add(i, i - 1, a / h2 - b / (2.0 * h));
                add(i, i, -2.0 * a / h2 + c.rate[i]);
                add(i, i + 1, a / h2 + b / (2.0 * h));
                break;
            case RowKind::Boundary: {
                const bool left = (i == 0);
                if (n >= 4) {
                    for (std::size_t k = 0; k < 4; ++k) {
                        add(i, left ? k : n - 1 - k, a * kOneSidedD2[k] / h2);
                    }
                } else {
                    // Three nodes only: first-order closure of ∂².
                    add(i, 0, a / h2);
                    add(i, 1, -2.0 * a / h2);
                    add(i, 2, a / h2);
                }
                for (std::size_t k = 0; k < 3; ++k) {
                    const double w = (left ? kOneSidedD1[k] : -kOneSidedD1[k]) / (2.0 * h);
                    add(i, left ? k : n - 1 - k, b * w);
                }
                add(i, i, c.rate[i]);
                break;
            }
        }
    }

    OperatorMatrix::Sparse m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return OperatorMatrix(g, std::move(m), std::move(kinds), tag);
}

std::vector<RowKind> default_kinds(std::size_t n, BoundaryTag tag) {
    std::vector<RowKind> kinds(n, RowKind::Interior);
    const auto edge = tag == BoundaryTag::OneSided ? RowKind::Boundary : RowKind::Dirichlet;
    kinds.front() = edge;
    kinds.back() = edge;
    return kinds;
}

const Grid1D& require_1d(const StateVector& s, const Grid1D& g) {
    const auto* sg = std::get_if<Grid1D>(&s.grid());
    if (sg == nullptr || !(*sg == g)) throw InvalidInput("state does not live on the given grid");
    return *sg;
}

/// Full rate V at each node; knocked-out nodes get +inf.
std::vector<double> sample_rate(const MarketParams& p, const Potential& v, const Grid1D& g) {
    std::vector<double> rate(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.point(i);
        if (v.is_barrier()) {
            rate[i] = v.knocked_out(x) ? kInf : p.r();
        } else {
            rate[i] = v(x);
            if (!std::isfinite(rate[i])) {
                throw InvalidInput("potential is not finite at x = " + format_number(x));
            }
        }
    }
    return rate;
}

}  // namespace

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(GridRef grid, Sparse matrix, std::vector<RowKind> rows,
                               BoundaryTag tag)
    : grid_(std::move(grid)), m_(std::move(matrix)), rows_(std::move(rows)), tag_(tag) {
    const auto n = grid_size(grid_);
    if (static_cast<std::size_t>(m_.rows()) != n || static_cast<std::size_t>(m_.cols()) != n ||
        rows_.size() != n) {
        throw InvalidInput("OperatorMatrix: shape does not match grid");
    }
    for (Eigen::Index k = 0; k < m_.nonZeros(); ++k) {
        if (!std::isfinite(m_.valuePtr()[k])) {
            throw InvalidInput("OperatorMatrix: non-finite entry");
        }
    }
}

bool OperatorMatrix::has_dirichlet_rows() const noexcept {
    return std::any_of(rows_.begin(), rows_.end(),
                       [](RowKind k) { return k == RowKind::Dirichlet; });
}

std::vector<std::size_t> OperatorMatrix::interior_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i] == RowKind::Interior) idx.push_back(i);
    }
    return idx;
}

std::vector<double> OperatorMatrix::apply(std::span<const double> u) const {
    if (u.size() != size()) throw InvalidInput("OperatorMatrix::apply: dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(u.size()));
    Eigen::VectorXd out = m_ * uv;
    return {out.data(), out.data() + out.size()};
}

Eigen::MatrixXd OperatorMatrix::interior_block() const {
    const auto idx = interior_indices();
    std::vector<long> pos(size(), -1);
    for (std::size_t k = 0; k < idx.size(); ++k) pos[idx[k]] = static_cast<long>(k);
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        for (Sparse::InnerIterator it(m_, static_cast<Eigen::Index>(idx[k])); it; ++it) {
            const long col = pos[static_cast<std::size_t>(it.col())];
            if (col >= 0) block(static_cast<Eigen::Index>(k), col) = it.value();
        }
    }
    return block;
}

OperatorMatrix OperatorMatrix::with_dirichlet_rows(std::span<const std::size_t> rows) const {
    Sparse m = m_;
    auto kinds = rows_;
    for (std::size_t r : rows) {
        if (r >= size()) throw InvalidInput("with_dirichlet_rows: row out of range");
        for (Sparse::InnerIterator it(m, static_cast<Eigen::Index>(r)); it; ++it) it.valueRef() = 0.0;
        kinds[r] = RowKind::Dirichlet;
    }
    m.prune(0.0);
    m.makeCompressed();
    return OperatorMatrix(grid_, std::move(m), std::move(kinds), tag_);
}

OperatorMatrix OperatorMatrix::transposed() const {
    if (has_dirichlet_rows()) {
        throw InvalidInput("transposed: operator has Dirichlet rows");
    }
    Sparse t = m_.transpose();
    t.makeCompressed();
    return OperatorMatrix(grid_, std::move(t), rows_, tag_);
}

// ---------------------------------------------------------------------------
// Potential

Potential::Potential(Kind kind, std::function<double(double)> rule, double lo, double hi)
    : kind_(kind), rule_(std::move(rule)), lo_(lo), hi_(hi) {}

Potential Potential::constant(double value) {
    if (!std::isfinite(value)) throw InvalidInput("Potential::constant: value must be finite");
    return Potential(Kind::Constant, [value](double) { return value; }, 0.0, 0.0);
}

Potential Potential::down_and_out(double level) {
    if (!std::isfinite(level)) throw InvalidInput("Potential::down_and_out: level must be finite");
    Potential p(Kind::DownAndOutBarrier, {}, level, kInf);
    p.rule_ = [p_lo = level](double x) {
        const double tol = 1e-12 * std::max(1.0, std::abs(p_lo));
        return x < p_lo - tol ? kInf : 0.0;
    };
    return p;
}

Potential Potential::double_knock_out(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw InvalidInput("Potential::double_knock_out: need finite lo < hi");
    }
    Potential p(Kind::DoubleKnockOut, {}, lo, hi);
    p.rule_ = [lo, hi](double x) {
        const double tl = 1e-12 * std::max(1.0, std::abs(lo));
        const double th = 1e-12 * std::max(1.0, std::abs(hi));
        return (x < lo - tl || x > hi + th) ? kInf : 0.0;
    };
    return p;
}

Potential Potential::tabulated(std::vector<double> xs, std::vector<double> values) {
    if (xs.size() != values.size() || xs.size() < 2) {
        throw InvalidInput("Potential::tabulated: need at least two matching samples");
    }
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(xs[i] < xs[i + 1])) throw InvalidInput("Potential::tabulated: xs must increase");
    }
    auto rule = [xs = std::move(xs), vs = std::move(values)](double x) {
        if (x <= xs.front()) return vs.front();
        if (x >= xs.back()) return vs.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const auto k = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double w = (x - xs[k]) / (xs[k + 1] - xs[k]);
        return (1.0 - w) * vs[k] + w * vs[k + 1];
    };
    return Potential(Kind::Tabulated, std::move(rule), 0.0, 0.0);
}

Potential Potential::tabulated(std::function<double(double)> rule) {
    if (!rule) throw InvalidInput("Potential::tabulated: empty rule");
    return Potential(Kind::Tabulated, std::move(rule), 0.0, 0.0);
}

bool Potential::is_barrier() const noexcept {
    return kind_ == Kind::DownAndOutBarrier || kind_ == Kind::DoubleKnockOut;
}

bool Potential::knocked_out(double x) const noexcept {
    return is_barrier() && std::isinf(rule_(x));
}

// ---------------------------------------------------------------------------
// Builders

OperatorMatrix build_bs_hamiltonian(const MarketParams& p, const Grid1D& g, BoundaryTag tag) {
    return build_effective_bs(p, Potential::constant(p.r()), g, tag);
}

OperatorMatrix build_effective_bs(const MarketParams& p, const Potential& v, const Grid1D& g,
                                  BoundaryTag tag) {
    const std::size_t n = g.size();
    const auto rate = sample_rate(p, v, g);
    auto kinds = default_kinds(n, tag);

    Coefficients1D c{-0.5 * p.sigma_sq(), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isinf(rate[i])) {
            kinds[i] = RowKind::Dirichlet;
            continue;
        }
        c.drift[i] = 0.5 * p.sigma_sq() - rate[i];
        c.rate[i] = rate[i];
    }
    return assemble_1d(g, c, std::move(kinds), tag);
}

OperatorMatrix build_double_knockout(const MarketParams& p, const Potential& v, const Grid1D& g) {
    if (v.kind() != Potential::Kind::DoubleKnockOut) {
        throw InvalidInput("build_double_knockout: potential must be DoubleKnockOut");
    }
    if (v.lower() < g.x_min() || v.upper() > g.x_max()) {
        throw InvalidInput("build_double_knockout: corridor must lie inside the grid");
    }
    return build_effective_bs(p, v, g);
}

OperatorMatrix build_hermitian_direct(const MarketParams& p, const Potential& v, const Grid1D& g) {
    const double s2 = p.sigma_sq();
    if (!(s2 > 0.0)) throw InvalidInput("build_hermitian_direct: sigma_sq must be positive");
    const std::size_t n = g.size();
    const double h = g.spacing();
    const auto rate = sample_rate(p, v, g);
    auto kinds = default_kinds(n, BoundaryTag::OneSided);

    auto finite_rate = [&](std::size_t i) { return std::isinf(rate[i]) ? p.r() : rate[i]; };

    Coefficients1D c{-0.5 * s2, std::vector<double>(n, 0.0), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isinf(rate[i])) {
            kinds[i] = RowKind::Dirichlet;
            continue;
        }
        double dv = 0.0;
        if (i == 0) {
            dv = (-3.0 * finite_rate(0) + 4.0 * finite_rate(1) - finite_rate(2)) / (2.0 * h);
        } else if (i + 1 == n) {
            dv = (3.0 * finite_rate(n - 1) - 4.0 * finite_rate(n - 2) + finite_rate(n - 3)) /
                 (2.0 * h);
        } else {
            dv = (finite_rate(i + 1) - finite_rate(i - 1)) / (2.0 * h);
        }
        const double shifted = rate[i] + 0.5 * s2;
        c.rate[i] = 0.5 * dv + shifted * shifted / (2.0 * s2);
    }
    return assemble_1d(g, c, std::move(kinds), BoundaryTag::OneSided);
}

OperatorMatrix build_mg_hamiltonian(const MGParams& p, const Grid2D& g) {
    p.validate();
    const auto& gx = g.x_axis();
    const auto& gy = g.y_axis();
    const std::size_t nx = gx.size();
    const std::size_t ny = gy.size();
    const double hx = gx.spacing();
    const double hy = gy.spacing();

    std::vector<Triplet> t;
    t.reserve(9 * g.size());
    std::vector<RowKind> kinds(g.size(), RowKind::Dirichlet);

    for (std::size_t j = 1; j + 1 < ny; ++j) {
        const double y = gy.point(j);
        const double ey = std::exp(y);
        const double a_xx = -0.5 * ey;
        const double b_x = -(p.r - 0.5 * ey);
        const double b_y = -p.volatility_drift(y);
        const double a_xy = -p.cross_coefficient(y);
        const double a_yy = -p.volatility_diffusion(y);

        const double wx_m = a_xx / (hx * hx) - b_x / (2.0 * hx);
        const double wx_p = a_xx / (hx * hx) + b_x / (2.0 * hx);
        const double wy_m = a_yy / (hy * hy) - b_y / (2.0 * hy);
        const double wy_p = a_yy / (hy * hy) + b_y / (2.0 * hy);
        const double w_c = -2.0 * a_xx / (hx * hx) - 2.0 * a_yy / (hy * hy) + p.r;
        const double w_xy = a_xy / (4.0 * hx * hy);

        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const auto row = static_cast<int>(g.index(i, j));
            kinds[g.index(i, j)] = RowKind::Interior;
            auto add = [&](std::size_t ii, std::size_t jj, double v) {
                if (v != 0.0) t.emplace_back(row, static_cast<int>(g.index(ii, jj)), v);
            };
            add(i - 1, j, wx_m);
            add(i + 1, j, wx_p);
            add(i, j - 1, wy_m);
            add(i, j + 1, wy_p);
            add(i, j, w_c);
            add(i + 1, j + 1, w_xy);
            add(i - 1, j - 1, w_xy);
            add(i + 1, j - 1, -w_xy);
            add(i - 1, j + 1, -w_xy);
        }
    }

    OperatorMatrix::Sparse m(static_cast<Eigen::Index>(g.size()),
                             static_cast<Eigen::Index>(g.size()));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return OperatorMatrix(g, std::move(m), std::move(kinds), BoundaryTag::DirichletZero);
}

// ---------------------------------------------------------------------------
// Hermiticity and the similarity transform

double hermiticity_defect(const OperatorMatrix& op) {
    const auto& m = op.matrix();
    double defect = 0.0;
    for (std::size_t i = 0; i < op.size(); ++i) {
        if (!op.is_interior(i)) continue;
        for (OperatorMatrix::Sparse::InnerIterator it(m, static_cast<Eigen::Index>(i)); it; ++it) {
            const auto j = static_cast<std::size_t>(it.col());
            if (!op.is_interior(j)) continue;
            defect = std::max(defect, 0.5 * std::abs(it.value() - op.coeff(j, i)));
        }
    }
    return defect;
}

SimilarityResult similarity_transform(const MarketParams& p, const Potential& v, const Grid1D& g) {
    const double s2 = p.sigma_sq();
    if (!(s2 > 0.0)) throw InvalidInput("similarity_transform: sigma_sq must be positive");

    const std::size_t n = g.size();
    const double h = g.spacing();
    const auto eff = build_effective_bs(p, v, g);
    const auto rate = sample_rate(p, v, g);

    // Continuum gauge: cumulative trapezoid of the finite part of V.
    std::vector<double> integral(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double a = std::isinf(rate[i - 1]) ? p.r() : rate[i - 1];
        const double b = std::isinf(rate[i]) ? p.r() : rate[i];
        integral[i] = integral[i - 1] + 0.5 * h * (a + b);
    }
    double anchor = 0.0;
    if (g.x_min() <= 0.0 && 0.0 <= g.x_max()) {
        const double t = -g.x_min() / h;
        const auto k = std::min(static_cast<std::size_t>(t), n - 2);
        const double w = t - static_cast<double>(k);
        anchor = (1.0 - w) * integral[k] + w * integral[k + 1];
    }
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 0.5 * g.point(i) - (integral[i] - anchor) / s2;

    // Discrete gauge: ½ln of the ratio of the central-difference couplings
    // between neighbours, which symmetrizes every interior pair exactly. The
    // same formula is used next to edge and dead rows so the gauge stays a
    // smooth O(h²) perturbation of s.
    std::vector<double> gauge(n);
    std::size_t start = 0;
    while (start < n && !eff.is_interior(start)) ++start;
    if (start == n) throw InvalidInput("similarity_transform: no interior rows");
    auto drift = [&](std::size_t i) {
        return 0.5 * s2 - (std::isinf(rate[i]) ? p.r() : rate[i]);
    };
    const double diff = 0.5 * s2 / (h * h);
    gauge[0] = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double ratio =
            (diff + drift(i + 1) / (2.0 * h)) / (diff - drift(i) / (2.0 * h));
        if (!(ratio > 0.0) || !std::isfinite(ratio)) {
            throw InvalidInput(
                "similarity_transform: grid too coarse for the drift "
                "(off-diagonal sign change at x = " + format_number(g.point(i)) + ")");
        }
        gauge[i + 1] = gauge[i] + 0.5 * std::log(ratio);
    }
    const double shift = s[start] - gauge[start];
    for (double& v : gauge) v += shift;

    // H_herm = e^{−ŝ} H_eff e^{ŝ}, with each interior pair set to its
    // geometric mean so the block is symmetric to the last bit.
    OperatorMatrix::Sparse m = eff.matrix();
    for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
        for (OperatorMatrix::Sparse::InnerIterator it(m, i); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            const auto c = static_cast<std::size_t>(it.col());
            if (r != c && eff.is_interior(r) && eff.is_interior(c)) {
                const double a = eff.coeff(r, c);
                const double b = eff.coeff(c, r);
                it.valueRef() = std::copysign(std::sqrt(a * b), a);
            } else {
                it.valueRef() = std::exp(gauge[c] - gauge[r]) * it.value();
            }
        }
    }

    SimilarityTransform tr{
        StateVector(g, std::move(s)),
        std::move(gauge),
        (p.r() + 0.5 * s2) * (p.r() + 0.5 * s2) / (2.0 * s2),
        (0.5 * s2 - p.r()) / s2,
    };
    std::vector<RowKind> kinds(eff.row_kinds().begin(), eff.row_kinds().end());
    return {std::move(tr), OperatorMatrix(g, std::move(m), std::move(kinds), eff.boundary())};
}

// ---------------------------------------------------------------------------
// Momentum

StateVector apply_momentum(const StateVector& state, const Grid1D& g) {
    require_1d(state, g);
    const std::size_t n = g.size();
    const double h = g.spacing();
    const auto u = state.values();
    std::vector<double> du(n);
    du[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    du[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) du[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    return StateVector(g, std::move(du));
}

StateVector apply_momentum(const StateVector& state, const Grid2D& g, Axis axis) {
    const auto* sg = std::get_if<Grid2D>(&state.grid());
    if (sg == nullptr || !(*sg == g)) throw InvalidInput("state does not live on the given grid");
    const std::size_t nx = g.x_axis().size();
    const std::size_t ny = g.y_axis().size();
    const auto u = state.values();
    std::vector<double> du(g.size());

    const bool along_x = axis == Axis::X;
    const std::size_t n = along_x ? nx : ny;
    const double h = along_x ? g.x_axis().spacing() : g.y_axis().spacing();
    const std::size_t lines = along_x ? ny : nx;
    for (std::size_t l = 0; l < lines; ++l) {
        auto at = [&](std::size_t k) {
            return along_x ? g.index(k, l) : g.index(l, k);
        };
        du[at(0)] = (-3.0 * u[at(0)] + 4.0 * u[at(1)] - u[at(2)]) / (2.0 * h);
        du[at(n - 1)] = (3.0 * u[at(n - 1)] - 4.0 * u[at(n - 2)] + u[at(n - 3)]) / (2.0 * h);
        for (std::size_t k = 1; k + 1 < n; ++k) {
            du[at(k)] = (u[at(k + 1)] - u[at(k - 1)]) / (2.0 * h);
        }
    }
    return StateVector(g, std::move(du));
}

void write_coordinate_list(std::ostream& out, const OperatorMatrix& op) {
    out << "row,col,value\n";
    const auto& m = op.matrix();
    for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
        for (OperatorMatrix::Sparse::InnerIterator it(m, i); it; ++it) {
            out << it.row() << ',' << it.col() << ',' << format_number(it.value()) << '\n';
        }
    }
}

}  // namespace mvac
