#include "mvac/vacuum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvac/errors.hpp"

namespace mvac {
namespace {

/// Real roots of a·t² + b·t + c (a ≠ 0), largest first, duplicates merged.
std::vector<double> quadratic_roots(double a, double b, double c) {
    std::vector<double> roots;
    if (c == 0.0) {
        roots.push_back(0.0);
        if (b != 0.0) roots.push_back(-b / a);
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0) return roots;
        const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
        roots.push_back(q / a);
        const double other = c / q;
        if (other != roots.front()) roots.push_back(other);
    }
    std::sort(roots.begin(), roots.end(), std::greater<>());
    return roots;
}

/// Real t solving a·t² + b·t + c = 0 for any a (possibly 0).
std::vector<double> general_roots(double a, double b, double c) {
    if (a != 0.0) return quadratic_roots(a, b, c);
    if (b != 0.0) return {-c / b};
    if (c == 0.0) throw InvalidInput("FieldRelation: every value solves the relation");
    return {};
}

/// coef·v^k with the power conventions of the field polynomials.
double term(double coef, std::optional<double> v, int k, const char* field) {
    if (coef == 0.0 || k == 0) return coef;
    if (!v) {
        throw InvalidInput(std::string("field ") + field + " is required for this order");
    }
    if (*v == 0.0 && k < 0) {
        throw InvalidInput(std::string("negative power of ") + field + " = 0");
    }
    return coef * std::pow(*v, k);
}

double term2(double coef, std::optional<double> vx, int kx, std::optional<double> vy, int ky) {
    if (coef == 0.0) return 0.0;
    return term(term(coef, vx, kx, "phi_x"), vy, ky, "phi_y");
}

void require_order(int n, int min, const char* what) {
    if (n < min) {
        throw InvalidInput(std::string(what) + ": order must be at least " + std::to_string(min) +
                           ", got " + std::to_string(n));
    }
}

std::size_t count_nonzero_distinct(const std::vector<double>& vals) {
    std::vector<double> nz;
    for (double v : vals) {
        if (v != 0.0 && std::find(nz.begin(), nz.end(), v) == nz.end()) nz.push_back(v);
    }
    return nz.size();
}

VacuumSolution bs_solution(Regime regime, int n, const std::vector<double>& roots) {
    VacuumSolution s;
    s.regime = regime;
    s.n = n;
    for (double r : roots) s.roots.push_back(FieldPoint{r, std::nullopt, n, std::nullopt});
    s.degeneracy = count_nonzero_distinct(roots);
    s.symmetry.price = s.degeneracy > 0 ? SymmetryStatus::Broken : SymmetryStatus::Preserved;
    return s;
}

SymmetryStatus status_of(double v) {
    return v != 0.0 ? SymmetryStatus::Broken : SymmetryStatus::Preserved;
}

struct MGCoefficients {
    double ey;
    double a;       // 1 − e^y/2r
    double drift;   // λe^{−y} + μ − (ζ²/2)e^{2y(α−1)}
    double cross;   // ρζe^{y(α−1/2)}
    double diff;    // ζ²e^{2y(α−1)}
    bool variance_is_2r;
    bool drift_zero;
};

MGCoefficients mg_coefficients(const MGParams& p, double y) {
    p.validate();
    if (!std::isfinite(y)) throw InvalidInput("y must be finite");
    MGCoefficients k{};
    k.ey = std::exp(y);
    k.a = 1.0 - k.ey / (2.0 * p.r);
    k.drift = p.volatility_drift(y);
    k.cross = p.cross_coefficient(y);
    k.diff = p.volatility_diffusion(y);
    k.variance_is_2r = std::abs(k.ey - 2.0 * p.r) <= kFlagTol;
    k.drift_zero = std::abs(k.drift) <= kFlagTol;
    return k;
}

void require_positive_rate(const MGParams& p) {
    if (!(p.r > 0.0)) throw InvalidInput("MG vacuum: r must be positive");
}

VacuumSolution mg_solution(Regime regime, int n, int m) {
    VacuumSolution s;
    s.regime = regime;
    s.n = n;
    s.m = m;
    s.symmetry.volatility = SymmetryStatus::Preserved;
    return s;
}

}  // namespace

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::Exact: return "exact";
        case Regime::WeakField: return "weak-field";
        case Regime::StrongField: return "strong-field";
        case Regime::Extremum: return "extremum";
        case Regime::StrongStrong: return "strong-strong";
        case Regime::WeakWeak: return "weak-weak";
        case Regime::StrongXWeakY: return "strong-x-weak-y";
        case Regime::WeakXStrongY: return "weak-x-strong-y";
        case Regime::Case: return "case";
    }
    return "unknown";
}

std::string_view to_string(SymmetryStatus s) noexcept {
    switch (s) {
        case SymmetryStatus::Preserved: return "preserved";
        case SymmetryStatus::Broken: return "broken";
        case SymmetryStatus::Exclusive: return "exclusive";
    }
    return "unknown";
}

double FieldRelation::residual(double px, double py) const noexcept {
    return xx * px * px + xy * px * py + yy * py * py + x * px + y * py + c;
}

std::vector<double> FieldRelation::solve_phi_y(double px) const {
    return general_roots(yy, xy * px + y, xx * px * px + x * px + c);
}

std::vector<double> FieldRelation::solve_phi_x(double py) const {
    return general_roots(xx, xy * py + x, yy * py * py + y * py + c);
}

std::vector<double> VacuumSolution::phi_x_values() const {
    std::vector<double> v;
    for (const auto& r : roots) {
        if (r.phi_x) v.push_back(*r.phi_x);
    }
    return v;
}

std::vector<double> VacuumSolution::phi_y_values() const {
    std::vector<double> v;
    for (const auto& r : roots) {
        if (r.phi_y) v.push_back(*r.phi_y);
    }
    return v;
}

// --- Black-Scholes ---------------------------------------------------------

double bs_potential_residual(const MarketParams& p, int n, double phi) {
    require_order(n, 0, "bs_potential_residual");
    const double s2 = p.sigma_sq();
    const double dn = n;
    return term(-0.5 * s2 * dn * (dn - 1.0), phi, n - 2, "phi") +
           term(p.drift_coefficient() * dn, phi, n - 1, "phi") + term(p.r(), phi, n, "phi");
}

double bs_potential_scale(const MarketParams& p, int n, double phi) {
    require_order(n, 0, "bs_potential_scale");
    const double s2 = p.sigma_sq();
    const double dn = n;
    return std::abs(term(-0.5 * s2 * dn * (dn - 1.0), phi, n - 2, "phi")) +
           std::abs(term(p.drift_coefficient() * dn, phi, n - 1, "phi")) +
           std::abs(term(p.r(), phi, n, "phi"));
}

double bs_reduced_residual(const MarketParams& p, int n, double phi) {
    const double dn = n;
    return p.r() * phi * phi + p.drift_coefficient() * dn * phi -
           0.5 * p.sigma_sq() * dn * (dn - 1.0);
}

double bs_reduced_scale(const MarketParams& p, int n, double phi) {
    const double dn = n;
    return std::abs(p.r() * phi * phi) + std::abs(p.drift_coefficient() * dn * phi) +
           std::abs(0.5 * p.sigma_sq() * dn * (dn - 1.0));
}

double bs_extremum_residual(const MarketParams& p, int n, double phi) {
    const double q = p.sigma_sq() / (2.0 * p.r());
    const double dn = n;
    return phi * phi + (q - 1.0) * (dn - 1.0) * phi - q * (dn - 1.0) * (dn - 2.0);
}

VacuumSolution bs_vacuum_exact(const MarketParams& p, int n) {
    require_order(n, 1, "bs_vacuum_exact");
    std::vector<double> roots;
    if (n == 1) {
        roots.push_back(0.0);
        if (!p.hermitian()) roots.push_back(1.0 - p.sigma_sq() / (2.0 * p.r()));
    } else {
        const double dn = n;
        roots = quadratic_roots(p.r(), p.drift_coefficient() * dn,
                                -0.5 * p.sigma_sq() * dn * (dn - 1.0));
    }
    auto s = bs_solution(Regime::Exact, n, roots);
    s.divided_out_trivial_root = n >= 3;
    return s;
}

VacuumSolution bs_vacuum_weak(const MarketParams& p, int n) {
    require_order(n, 1, "bs_vacuum_weak");
    double root = 0.0;
    if (n != 1 && p.sigma_sq() != 0.0) {
        if (p.hermitian()) {
            throw SingularRegimeError("weak-field vacuum has a pole at sigma_sq = 2r");
        }
        root = p.sigma_sq() * (n - 1.0) / (p.sigma_sq() - 2.0 * p.r());
    }
    auto s = bs_solution(Regime::WeakField, n, {root});
    s.approximate = true;
    return s;
}

VacuumSolution bs_vacuum_strong(const MarketParams& p, int n) {
    require_order(n, 1, "bs_vacuum_strong");
    std::vector<double> roots{0.0};
    if (!p.hermitian()) {
        const double nontrivial = (1.0 - p.sigma_sq() / (2.0 * p.r())) * n;
        if (nontrivial != 0.0) roots.push_back(nontrivial);
    }
    auto s = bs_solution(Regime::StrongField, n, roots);
    s.approximate = true;
    return s;
}

VacuumSolution bs_extremum_roots(const MarketParams& p, int n) {
    require_order(n, 1, "bs_extremum_roots");
    const double q = p.sigma_sq() / (2.0 * p.r());
    const double dn = n;
    return bs_solution(Regime::Extremum, n,
                       quadratic_roots(1.0, (q - 1.0) * (dn - 1.0), -q * (dn - 1.0) * (dn - 2.0)));
}

// --- Merton-Garman ---------------------------------------------------------

namespace {

struct MGTerms {
    double t[6];
};

MGTerms mg_terms(const MGParams& p, const FieldPoint& pt, double y) {
    require_order(pt.n, 0, "mg_polynomial_residual");
    if (!pt.m) throw InvalidInput("mg_polynomial_residual: m is required");
    const int n = pt.n;
    const int m = *pt.m;
    require_order(m, 0, "mg_polynomial_residual");
    p.validate();
    const double ey = std::exp(y);
    const double dn = n;
    const double dm = m;
    const auto& px = pt.phi_x;
    const auto& py = pt.phi_y;
    return MGTerms{{
        term2(-0.5 * ey * dn * (dn - 1.0), px, n - 2, py, m),
        term2(-(p.r - 0.5 * ey) * dn, px, n - 1, py, m),
        term2(-p.volatility_drift(y) * dm, px, n, py, m - 1),
        term2(-p.cross_coefficient(y) * dn * dm, px, n - 1, py, m - 1),
        term2(-p.volatility_diffusion(y) * dm * (dm - 1.0), px, n, py, m - 2),
        term2(p.r, px, n, py, m),
    }};
}

}  // namespace

double mg_polynomial_residual(const MGParams& p, const FieldPoint& point, double y) {
    const auto t = mg_terms(p, point, y);
    double sum = 0.0;
    for (double v : t.t) sum += v;
    return sum;
}

double mg_polynomial_scale(const MGParams& p, const FieldPoint& point, double y) {
    const auto t = mg_terms(p, point, y);
    double sum = 0.0;
    for (double v : t.t) sum += std::abs(v);
    return sum;
}

VacuumSolution mg_case_solver(const MGParams& p, double y, int n, int m) {
    require_positive_rate(p);
    const auto k = mg_coefficients(p, y);
    auto s = mg_solution(Regime::Case, n, m);

    if (n == 1 && m == 0) {
        const double phi_x = k.variance_is_2r ? 0.0 : k.a;
        s.roots.push_back(FieldPoint{phi_x, std::nullopt, n, m});
        s.phi_y_arbitrary = true;
        s.degeneracy = count_nonzero_distinct({phi_x});
        s.symmetry.price = status_of(phi_x);
        s.symmetry.volatility = SymmetryStatus::Broken;
        return s;
    }
    if (n == 0 && m == 1) {
        const double phi_y = k.drift_zero ? 0.0 : k.drift / p.r;
        s.roots.push_back(FieldPoint{std::nullopt, phi_y, n, m});
        s.phi_x_arbitrary = true;
        s.degeneracy = count_nonzero_distinct({phi_y});
        s.symmetry.price = SymmetryStatus::Broken;
        s.symmetry.volatility = status_of(phi_y);
        return s;
    }
    if (n == 1 && m == 1) {
        FieldRelation rel;
        rel.xy = p.r;
        rel.c = -k.cross;
        const bool hermitian = k.variance_is_2r && k.drift_zero;
        if (!hermitian) {
            rel.x = -k.drift;
            rel.y = -(p.r - 0.5 * k.ey);
        }
        s.relation = rel;
        s.continuum = true;
        const auto status = hermitian && rel.c == 0.0 ? SymmetryStatus::Exclusive
                                                       : SymmetryStatus::Broken;
        s.symmetry.price = status;
        s.symmetry.volatility = status;
        return s;
    }
    throw InvalidInput("mg_case_solver: unsupported case (n, m) = (" + std::to_string(n) + ", " +
                       std::to_string(m) + "); supported: (0,1), (1,0), (1,1)");
}

VacuumSolution mg_regime_solver(const MGParams& p, double y, int n, int m, Regime regime,
                                std::optional<double> phi_x) {
    require_positive_rate(p);
    require_order(n, 0, "mg_regime_solver");
    require_order(m, 0, "mg_regime_solver");
    const auto k = mg_coefficients(p, y);
    auto s = mg_solution(regime, n, m);
    s.approximate = true;

    switch (regime) {
        case Regime::StrongStrong: {
            FieldRelation rel;
            rel.xy = 1.0;
            const bool hermitian = k.variance_is_2r && k.drift_zero;
            if (!hermitian) {
                rel.y = -k.a * n;
                rel.x = -(k.drift / p.r) * m;
            }
            s.relation = rel;
            s.continuum = true;
            const auto status = hermitian ? SymmetryStatus::Exclusive : SymmetryStatus::Broken;
            s.symmetry.price = status;
            s.symmetry.volatility = status;
            return s;
        }
        case Regime::WeakWeak: {
            FieldRelation rel;
            rel.yy = -0.5 * k.ey * n * (n - 1.0);
            rel.xy = -k.cross * n * m;
            rel.xx = -k.diff * m * (m - 1.0);
            s.relation = rel;
            if (n == 1 && m == 1) {
                s.relation = FieldRelation{0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
                s.continuum = true;
                s.symmetry.price = SymmetryStatus::Exclusive;
                s.symmetry.volatility = SymmetryStatus::Exclusive;
                return s;
            }
            if (!phi_x) throw InvalidInput("weak-weak regime needs phi_x");
            if (n == 0 || m == 0) {
                throw SingularRegimeError("weak-weak regime is singular when n*m = 0");
            }
            if (p.rho == 0.0) {
                throw SingularRegimeError("weak-weak regime is singular when rho = 0");
            }
            const double lever = p.zeta * std::exp(y * (p.alpha - 1.5));
            std::vector<double> ys;
            if (n == 1) {
                ys.push_back(-lever * (m - 1.0) * *phi_x / p.rho);
            } else {
                const double disc =
                    1.0 - 2.0 * (m - 1.0) * (n - 1.0) / (p.rho * p.rho * n * m);
                if (disc < 0.0) {
                    s.no_real_solution = true;
                } else {
                    const double pre = p.rho * lever * m * *phi_x / (1.0 - n);
                    const double root = std::sqrt(disc);
                    ys.push_back(pre * (1.0 + root));
                    if (root != 0.0) ys.push_back(pre * (1.0 - root));
                }
            }
            for (double v : ys) s.roots.push_back(FieldPoint{*phi_x, v, n, m});
            s.degeneracy = count_nonzero_distinct(ys);
            s.symmetry.price = status_of(*phi_x);
            s.symmetry.volatility = s.degeneracy > 0 ? SymmetryStatus::Broken
                                                     : SymmetryStatus::Preserved;
            return s;
        }
        case Regime::StrongXWeakY: {
            if (k.drift_zero) {
                throw SingularRegimeError(
                    "strong-x/weak-y regime is singular when the volatility drift vanishes");
            }
            const double phi_y = k.diff * (1.0 - m) / k.drift;
            s.roots.push_back(FieldPoint{0.0, phi_y, n, m});
            s.degeneracy = count_nonzero_distinct({phi_y});
            s.symmetry.price = SymmetryStatus::Preserved;
            s.symmetry.volatility = status_of(phi_y);
            return s;
        }
        case Regime::WeakXStrongY: {
            if (k.variance_is_2r) {
                throw SingularRegimeError("weak-x/strong-y regime is singular when e^y = 2r");
            }
            const double phi_x_root = (1.0 - n) * (0.5 * k.ey) / (p.r - 0.5 * k.ey);
            s.roots.push_back(FieldPoint{phi_x_root, 0.0, n, m});
            s.degeneracy = count_nonzero_distinct({phi_x_root});
            s.symmetry.price = status_of(phi_x_root);
            s.symmetry.volatility = SymmetryStatus::Preserved;
            s.limit_value = n - 1.0;
            return s;
        }
        default:
            throw InvalidInput("mg_regime_solver: regime must be strong-strong, weak-weak, "
                               "strong-x-weak-y or weak-x-strong-y");
    }
}

// --- Information flow ------------------------------------------------------

RegimeReport classify_information_flow(const MarketParams& p) {
    return RegimeReport{.params = p,
                        .y = std::nullopt,
                        .sigma_sq_is_2r = p.hermitian(),
                        .volatility_drift = std::nullopt,
                        .volatility_drift_zero = std::nullopt,
                        .variance_is_2r = std::nullopt,
                        .information_preserved = p.hermitian()};
}

RegimeReport classify_information_flow(const MGParams& p, double y) {
    p.validate();
    const double drift = p.volatility_drift(y);
    const bool drift_zero = std::abs(drift) <= kFlagTol;
    const bool variance_is_2r = std::abs(std::exp(y) - 2.0 * p.r) <= kFlagTol;
    return RegimeReport{.params = p,
                        .y = y,
                        .sigma_sq_is_2r = std::nullopt,
                        .volatility_drift = drift,
                        .volatility_drift_zero = drift_zero,
                        .variance_is_2r = variance_is_2r,
                        .information_preserved = drift_zero && variance_is_2r};
}

}  // namespace mvac
