#include "mvac/records.hpp"

#include <cmath>
#include <ostream>

#include "json.hpp"
#include "mvac/errors.hpp"

namespace mvac {
namespace {

using nlohmann::json;

json number_or_null(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

template <typename T>
json optional_value(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json relation_json(const FieldRelation& r) {
    return json{{"xx", r.xx}, {"xy", r.xy}, {"yy", r.yy}, {"x", r.x}, {"y", r.y}, {"c", r.c}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string_view consistency_kind(ConsistencyReport::Kind k) {
    switch (k) {
        case ConsistencyReport::Kind::YRoot: return "y-root";
        case ConsistencyReport::Kind::ParameterIdentity: return "parameter-identity";
        case ConsistencyReport::Kind::Degenerate: return "degenerate";
        case ConsistencyReport::Kind::NoSolution: return "no-solution";
    }
    return "unknown";
}

}  // namespace

std::string to_json(const VacuumSolution& s) {
    json roots = json::array();
    for (const auto& r : s.roots) {
        roots.push_back(json{{"phi_x", number_or_null(r.phi_x)},
                             {"phi_y", number_or_null(r.phi_y)}});
    }
    json symmetry{{"price", to_string(s.symmetry.price)}};
    symmetry["volatility"] =
        s.symmetry.volatility ? json(to_string(*s.symmetry.volatility)) : json(nullptr);
    json j{
        {"regime", to_string(s.regime)},
        {"n", s.n},
        {"m", optional_value(s.m)},
        {"roots", roots},
        {"degeneracy", s.degeneracy},
        {"symmetry", symmetry},
        {"flags",
         {{"approximate", s.approximate},
          {"no_real_solution", s.no_real_solution},
          {"divided_out_trivial_root", s.divided_out_trivial_root},
          {"phi_x_arbitrary", s.phi_x_arbitrary},
          {"phi_y_arbitrary", s.phi_y_arbitrary},
          {"continuum", s.continuum}}},
        {"relation", s.relation ? relation_json(*s.relation) : json(nullptr)},
        {"limit_value", number_or_null(s.limit_value)},
    };
    return dump(j);
}

std::string to_json(const MartingaleReport& r) {
    return dump(json{{"residual_max", r.residual_max},
                     {"residual_l2", r.residual_l2},
                     {"h", r.h},
                     {"tolerance", r.tolerance},
                     {"rows_checked", r.rows_checked},
                     {"verdict", r.pass ? "pass" : "fail"}});
}

std::string to_json(const ConstraintRoot& r) {
    return dump(json{{"y_star", r.y_star},
                     {"residual", r.residual},
                     {"bracket", {r.bracket_lo, r.bracket_hi}},
                     {"iterations", r.iterations}});
}

std::string to_json(const ConsistencyReport& r) {
    return dump(json{{"kind", consistency_kind(r.kind)},
                     {"y", number_or_null(r.y)},
                     {"identity_residual", r.identity_residual},
                     {"identity_holds", r.identity_holds}});
}

std::string to_json(const RegimeReport& r) {
    json params;
    if (const auto* bs = std::get_if<MarketParams>(&r.params)) {
        params = json{{"model", "bs"}, {"r", bs->r()}, {"sigma_sq", bs->sigma_sq()}};
    } else {
        const auto& mg = std::get<MGParams>(r.params);
        params = json{{"model", "mg"},   {"r", mg.r},         {"lambda", mg.lambda},
                      {"mu", mg.mu},     {"zeta", mg.zeta},   {"alpha", mg.alpha},
                      {"rho", mg.rho}};
    }
    return dump(json{
        {"params", params},
        {"y", number_or_null(r.y)},
        {"flags",
         {{"sigma_sq_is_2r", optional_value(r.sigma_sq_is_2r)},
          {"volatility_drift", number_or_null(r.volatility_drift)},
          {"volatility_drift_zero", optional_value(r.volatility_drift_zero)},
          {"variance_is_2r", optional_value(r.variance_is_2r)}}},
        {"information_flow", r.information_preserved ? "preserved" : "leaking"},
    });
}

std::string to_json(const McMartingaleResult& r) {
    return dump(json{{"statistic", r.statistic},
                     {"standard_error", r.standard_error},
                     {"n_paths", r.n_paths},
                     {"verdict", r.passes() ? "pass" : "fail"}});
}

std::string to_json(const FlowReport& r) {
    return dump(json{{"times", r.times},
                     {"mass", r.mass},
                     {"norm", r.norm},
                     {"mass_drift", r.mass_drift},
                     {"norm_drift", r.norm_drift}});
}

std::string error_json(std::string_view kind, std::string_view message) {
    return dump(json{{"error", kind}, {"message", message}});
}

KeyValueRecord to_record(const MartingaleReport& r) {
    return {
        {"residual_max", format_number(r.residual_max)},
        {"residual_l2", format_number(r.residual_l2)},
        {"h", format_number(r.h)},
        {"tolerance", format_number(r.tolerance)},
        {"rows_checked", std::to_string(r.rows_checked)},
        {"verdict", r.pass ? "pass" : "fail"},
    };
}

void write_csv(std::ostream& out, const VacuumSolution& s) {
    const std::vector<std::string> header{"regime", "n",           "m",          "phi_x",
                                          "phi_y",  "degeneracy", "approximate"};
    CsvWriter csv(out, header);
    auto field = [&](std::optional<double> v, bool arbitrary) {
        if (v) {
            csv.cell(*v);
        } else {
            csv.cell(std::string_view(arbitrary ? "arbitrary" : ""));
        }
    };
    for (const auto& r : s.roots) {
        csv.cell(to_string(s.regime)).cell(static_cast<long long>(s.n));
        if (s.m) {
            csv.cell(static_cast<long long>(*s.m));
        } else {
            csv.cell(std::string_view{});
        }
        field(r.phi_x, s.phi_x_arbitrary);
        field(r.phi_y, s.phi_y_arbitrary);
        csv.cell(static_cast<long long>(s.degeneracy))
            .cell(std::string_view(s.approximate ? "true" : "false"));
        csv.end_row();
    }
}

void write_csv(std::ostream& out, const FlowReport& r) {
    const std::vector<std::string> header{"t", "mass", "norm"};
    CsvWriter csv(out, header);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        csv.cell(r.times[k]).cell(r.mass[k]).cell(r.norm[k]);
        csv.end_row();
    }
}

void write_curve_csv(std::ostream& out, const StateVector& curve) {
    const auto* g = std::get_if<Grid1D>(&curve.grid());
    if (g == nullptr) throw InvalidInput("write_curve_csv: 1-D curves only");
    const std::vector<std::string> header{"x", "S", "value"};
    CsvWriter csv(out, header);
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double x = g->point(i);
        csv.cell(x).cell(std::exp(x)).cell(curve[i]);
        csv.end_row();
    }
}

}  // namespace mvac
