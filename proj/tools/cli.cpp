#include "mvac/cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvac/config.hpp"
#include "mvac/errors.hpp"
#include "mvac/evolution.hpp"
#include "mvac/io.hpp"
#include "mvac/martingale.hpp"
#include "mvac/model.hpp"
#include "mvac/operators.hpp"
#include "mvac/records.hpp"
#include "mvac/sde.hpp"
#include "mvac/vacuum.hpp"

namespace mvac::cli {
namespace {

using nlohmann::json;

constexpr const char* kTool = "mvac";
constexpr const char* kVersion = MVAC_VERSION;

struct OptionSpec {
    std::string name;
    std::optional<std::string> fallback;
    std::string help;
    int arity = 1;
};

/// Resolved option values of one command; absent means "not given, no default".
class Options {
public:
    explicit Options(std::map<std::string, std::string> values) : values_(std::move(values)) {}

    bool has(const std::string& name) const { return values_.contains(name); }

    const std::string& text(const std::string& name) const {
        const auto it = values_.find(name);
        if (it == values_.end()) throw InvalidInput("missing required option --" + name);
        return it->second;
    }

    double number(const std::string& name) const {
        try {
            return parse_number(text(name));
        } catch (const InvalidInput&) {
            if (!has(name)) throw;
            throw InvalidInput("--" + name + ": not a number: '" + text(name) + "'");
        }
    }

    std::optional<double> maybe_number(const std::string& name) const {
        if (!has(name)) return std::nullopt;
        return number(name);
    }

    long long integer(const std::string& name) const {
        const double v = number(name);
        if (v != std::floor(v) || std::abs(v) > 9.0e15) {
            throw InvalidInput("--" + name + ": expected an integer, got '" + text(name) + "'");
        }
        return static_cast<long long>(v);
    }

    std::size_t count(const std::string& name) const {
        const long long v = integer(name);
        if (v < 0) throw InvalidInput("--" + name + " must be non-negative");
        return static_cast<std::size_t>(v);
    }

    std::vector<double> numbers(const std::string& name) const {
        std::istringstream in(text(name));
        std::vector<double> out;
        for (std::string tok; in >> tok;) out.push_back(parse_number(tok));
        return out;
    }

    std::string choice(const std::string& name, std::initializer_list<const char*> allowed) const {
        const std::string& v = text(name);
        for (const char* a : allowed) {
            if (v == a) return v;
        }
        std::string list;
        for (const char* a : allowed) list += std::string(list.empty() ? "" : "|") + a;
        throw InvalidInput("--" + name + " must be one of " + list + ", got '" + v + "'");
    }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

struct Output {
    std::string csv;
    std::string json;
};

struct Verb {
    std::string name;
    std::string description;
    std::vector<OptionSpec> options;
    std::function<Output(const Options&)> handler;
};

std::string csv_of(const std::function<void(std::ostream&)>& write) {
    std::ostringstream s;
    write(s);
    return s.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// --- option groups ---------------------------------------------------------

std::vector<OptionSpec> bs_options() {
    return {{"r", std::nullopt, "spot rate"}, {"sigma-sq", std::nullopt, "variance sigma^2"}};
}

std::vector<OptionSpec> mg_options(bool with_r) {
    std::vector<OptionSpec> o;
    if (with_r) o.push_back({"r", std::nullopt, "spot rate"});
    o.push_back({"lambda", "0", "volatility drift, constant part"});
    o.push_back({"mu", "0", "volatility drift, linear part"});
    o.push_back({"zeta", "0", "volatility of volatility"});
    o.push_back({"alpha", "1", "volatility elasticity"});
    o.push_back({"rho", "0", "price-volatility correlation"});
    return o;
}

std::vector<OptionSpec> y_options() {
    return {{"y", std::nullopt, "log-variance (alternative to --variance)"},
            {"variance", std::nullopt, "variance e^y (alternative to --y)"}};
}

std::vector<OptionSpec> join(std::vector<std::vector<OptionSpec>> groups) {
    std::vector<OptionSpec> out;
    for (auto& g : groups) out.insert(out.end(), g.begin(), g.end());
    return out;
}

MarketParams market(const Options& o) { return {o.number("r"), o.number("sigma-sq")}; }

MGParams mg(const Options& o, bool with_r) {
    MGParams p;
    p.r = with_r ? o.number("r") : 0.0;
    p.lambda = o.number("lambda");
    p.mu = o.number("mu");
    p.zeta = o.number("zeta");
    p.alpha = o.number("alpha");
    p.rho = o.number("rho");
    p.validate();
    return p;
}

double log_variance(const Options& o) {
    if (o.has("y") && o.has("variance")) throw InvalidInput("give --y or --variance, not both");
    if (o.has("y")) return o.number("y");
    if (!o.has("variance")) throw InvalidInput("missing required option --y or --variance");
    const double v = o.number("variance");
    if (!(v > 0.0)) throw InvalidInput("--variance must be positive");
    return std::log(v);
}

int order(const Options& o, const std::string& name) {
    const long long v = o.integer(name);
    if (v < 0 || v > 10000) throw InvalidInput("--" + name + " out of range");
    return static_cast<int>(v);
}

std::pair<double, double> bracket(const Options& o) {
    const auto b = o.numbers("bracket");
    if (b.size() != 2) throw InvalidInput("--bracket takes two numbers");
    return {b[0], b[1]};
}

void reject_all(const Options& o, std::initializer_list<const char*> names,
                const std::string& why) {
    for (const char* n : names) {
        if (o.has(n)) throw InvalidInput(std::string("--") + n + " " + why);
    }
}

// --- verbs -----------------------------------------------------------------

Output bs_vacuum(const Options& o) {
    const auto p = market(o);
    const int n = order(o, "n");
    const auto regime = o.choice("regime", {"exact", "weak-field", "strong-field", "extremum"});
    VacuumSolution s;
    if (regime == "exact") {
        s = bs_vacuum_exact(p, n);
    } else if (regime == "weak-field") {
        s = bs_vacuum_weak(p, n);
    } else if (regime == "strong-field") {
        s = bs_vacuum_strong(p, n);
    } else {
        s = bs_extremum_roots(p, n);
    }
    return {csv_of([&](std::ostream& out) { write_csv(out, s); }), to_json(s)};
}

Output mg_vacuum(const Options& o) {
    const auto p = mg(o, true);
    const double y = log_variance(o);
    const int n = order(o, "n");
    const int m = order(o, "m");
    const auto regime = o.choice(
        "regime", {"case", "strong-strong", "weak-weak", "strong-x-weak-y", "weak-x-strong-y"});
    VacuumSolution s;
    if (regime == "case") {
        s = mg_case_solver(p, y, n, m);
    } else {
        const Regime r = regime == "strong-strong"     ? Regime::StrongStrong
                         : regime == "weak-weak"       ? Regime::WeakWeak
                         : regime == "strong-x-weak-y" ? Regime::StrongXWeakY
                                                       : Regime::WeakXStrongY;
        s = mg_regime_solver(p, y, n, m, r, o.maybe_number("phi-x"));
    }
    return {csv_of([&](std::ostream& out) { write_csv(out, s); }), to_json(s)};
}

StateVector exp_x_state(const Grid2D& g) {
    std::vector<double> v(g.size());
    const auto xs = g.x_axis().points();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < g.y_axis().size(); ++j) v[g.index(i, j)] = std::exp(xs[i]);
    }
    return {g, std::move(v)};
}

Output martingale_check(const Options& o) {
    const auto model = o.choice("model", {"bs", "mg", "mg-extended"});
    const bool custom = o.choice("grid", {"default", "custom"}) == "custom";
    if (!custom) {
        reject_all(o, {"x-min", "x-max", "n-points", "y-min", "y-max", "m-points", "y-halfwidth"},
                   "needs --grid custom");
    }
    auto x_axis = [&](double lo, double hi, std::size_t n) {
        return custom ? Grid1D(o.number("x-min"), o.number("x-max"), o.count("n-points"))
                      : Grid1D(lo, hi, n);
    };

    MartingaleReport rep;
    std::optional<double> y_star;
    if (model == "bs") {
        const auto p = market(o);
        const Grid1D g = x_axis(-4.0, 4.0, 801);
        const auto state = sample_martingale_state(g);
        const double tol = o.has("tol") ? o.number("tol") : grid_scaled_tolerance(state);
        rep = martingale_residual(build_bs_hamiltonian(p, g), state, tol);
    } else if (model == "mg") {
        const auto p = mg(o, true);
        const Grid1D gx = x_axis(-1.0, 1.0, 201);
        const double y0 = std::log(0.04);
        const Grid1D gy = custom ? Grid1D(o.number("y-min"), o.number("y-max"), o.count("m-points"))
                                 : Grid1D(y0 - 1.0, y0 + 1.0, 201);
        const Grid2D g(gx, gy);
        const auto state = exp_x_state(g);
        const double tol = o.has("tol") ? o.number("tol") : grid_scaled_tolerance(state);
        rep = martingale_residual(build_mg_hamiltonian(p, g), state, tol);
    } else {
        const auto p = mg(o, true);
        const auto [lo, hi] = bracket(o);
        const auto root = solve_extended_constraint(p, lo, hi);
        y_star = root.y_star;
        const Grid1D gx = x_axis(-1.0, 1.0, 201);
        const double half = custom ? o.number("y-halfwidth") : 1.0;
        const std::size_t m = custom ? o.count("m-points") : 201;
        if (m % 2 == 0) throw InvalidInput("--m-points must be odd so y* is a node");
        const Grid2D g(gx, Grid1D(root.y_star - half, root.y_star + half, m));
        const auto state = sample_extended_martingale_state(g);
        const double tol = o.has("tol") ? o.number("tol") : grid_scaled_tolerance(state);
        std::vector<std::size_t> rows;
        for (std::size_t i = 1; i + 1 < gx.size(); ++i) rows.push_back(g.index(i, m / 2));
        rep = martingale_residual(build_mg_hamiltonian(p, g), state, tol, rows);
    }

    KeyValueRecord rec = to_record(rep);
    if (y_star) rec.emplace_back("y_star", format_number(*y_star));
    std::vector<std::string> header;
    for (const auto& [k, v] : rec) header.push_back(k);
    const std::string csv = csv_of([&](std::ostream& out) {
        CsvWriter w(out, header);
        for (const auto& [k, v] : rec) w.cell(std::string_view(v));
        w.end_row();
    });
    json j = json::parse(to_json(rep));
    j["model"] = model;
    if (y_star) j["y_star"] = *y_star;
    return {csv, dump(j)};
}

Output constraint_solve(const Options& o) {
    const auto p = mg(o, false);
    const auto [lo, hi] = bracket(o);
    const auto root = solve_extended_constraint(p, lo, hi);
    const std::vector<std::string> header{"y_star", "residual", "bracket_lo", "bracket_hi",
                                          "iterations"};
    const std::string csv = csv_of([&](std::ostream& out) {
        CsvWriter w(out, header);
        w.cell(root.y_star).cell(root.residual).cell(root.bracket_lo).cell(root.bracket_hi);
        w.cell(static_cast<long long>(root.iterations));
        w.end_row();
    });
    return {csv, to_json(root)};
}

Output price(const Options& o) {
    const auto p = market(o);
    const auto kind = o.choice("payoff", {"call", "put", "bond", "asset"});
    const double s0 = o.number("s0");
    if (!(s0 > 0.0)) throw InvalidInput("--s0 must be positive");
    const double maturity = o.number("maturity");
    const std::size_t n = o.count("n-points");
    Payoff payoff = kind == "bond" ? Payoff::bond() : Payoff::asset();
    if (kind == "call") payoff = Payoff::call(o.number("strike"));
    if (kind == "put") payoff = Payoff::put(o.number("strike"));

    if (o.has("x-min") != o.has("x-max")) throw InvalidInput("give both --x-min and --x-max");
    const Grid1D g = o.has("x-min") ? Grid1D(o.number("x-min"), o.number("x-max"), n)
                                    : Grid1D::centered_on_spot(s0, p.sigma_sq(), maturity, n);
    const PricingConfig cfg{.n_steps = o.count("steps"), .smoothing_steps = o.count("smoothing")};

    auto level = [&](const std::string& name) {
        const double b = o.number(name);
        if (!(b > 0.0)) throw InvalidInput("--" + name + " must be positive");
        return std::log(b);
    };
    const auto barrier = o.choice("barrier", {"none", "down-and-out", "double-knock-out"});
    std::optional<StateVector> curve;
    if (barrier == "none") {
        curve = price_option(p, payoff, maturity, g, cfg);
    } else if (barrier == "down-and-out") {
        curve = price_barrier(p, payoff, Potential::down_and_out(level("barrier-lo")), maturity,
                              g, cfg);
    } else {
        curve = price_barrier(p, payoff,
                              Potential::double_knock_out(level("barrier-lo"), level("barrier-hi")),
                              maturity, g, cfg);
    }
    const double value = price_at_spot(*curve, s0);
    json j{{"payoff", kind},     {"barrier", barrier},        {"s0", s0},
           {"maturity", maturity}, {"price", value},          {"n_points", g.size()},
           {"x_min", g.x_min()},  {"x_max", g.x_max()}};
    return {csv_of([&](std::ostream& out) { write_curve_csv(out, *curve); }), dump(j)};
}

Output evolve_verb(const Options& o) {
    const auto p = market(o);
    const bool unitary = o.choice("mode", {"euclidean", "unitary"}) == "unitary";
    const auto tag = o.choice("boundary", {"one-sided", "dirichlet-zero"}) == "one-sided"
                         ? BoundaryTag::OneSided
                         : BoundaryTag::DirichletZero;
    const Grid1D g(o.number("x-min"), o.number("x-max"), o.count("n-points"));
    const auto initial = o.choice("initial", {"gaussian", "martingale", "bond"});
    const double center = o.number("center");
    const double width = o.number("width");
    if (initial == "gaussian" && !(width > 0.0)) throw InvalidInput("--width must be positive");
    std::vector<double> v;
    for (double x : g.points()) {
        if (initial == "gaussian") {
            v.push_back(std::exp(-0.5 * (x - center) * (x - center) / (width * width)));
        } else if (initial == "martingale") {
            v.push_back(std::exp(x));
        } else {
            v.push_back(1.0);
        }
    }
    const EvolutionConfig cfg{.dt = o.number("dt"),
                              .n_steps = o.count("steps"),
                              .mode = unitary ? EvolutionMode::Unitary : EvolutionMode::Euclidean,
                              .smoothing_steps = 0};
    const auto res = evolve(build_bs_hamiltonian(p, g, tag), StateVector(g, std::move(v)), cfg);
    const auto& f = res.flow;
    json j{{"mode", unitary ? "unitary" : "euclidean"},
           {"steps", cfg.n_steps},
           {"dt", cfg.dt},
           {"mass_initial", f.mass.front()},
           {"mass_final", f.mass.back()},
           {"norm_initial", f.norm.front()},
           {"norm_final", f.norm.back()},
           {"mass_drift", f.mass_drift},
           {"norm_drift", f.norm_drift}};
    return {csv_of([&](std::ostream& out) { write_csv(out, f); }), dump(j)};
}

Output simulate(const Options& o) {
    const bool is_mg = o.choice("model", {"gbm", "mg"}) == "mg";
    const double s0 = o.number("s0");
    const double horizon = o.number("horizon");
    const double dt = o.number("dt");
    const std::size_t paths = o.count("paths");
    const auto seed = static_cast<std::uint64_t>(o.count("seed"));
    const auto workers = static_cast<unsigned>(o.count("workers"));
    const std::size_t max_rows = o.count("max-rows");
    const double drift = o.has("drift") ? o.number("drift") : o.number("r");

    const std::size_t steps = step_count(horizon, dt);
    if (paths != 0 && steps + 1 > max_rows / paths) {
        throw InvalidInput("ensemble of " + std::to_string(paths) + " paths x " +
                           std::to_string(steps + 1) + " times exceeds --max-rows " +
                           std::to_string(max_rows));
    }
    const PathEnsemble e =
        is_mg ? simulate_mg(mg(o, true), drift, s0, o.number("v0"), horizon, dt, paths, seed,
                            workers)
              : simulate_gbm(SDEParams{drift, market(o)}, s0, horizon, dt, paths, seed, workers);

    const double r = o.number("r");
    double sum = 0.0;
    for (std::size_t q = 0; q < e.n_paths; ++q) sum += e.s_at(q, e.n_steps);
    const double mean = e.n_paths ? sum / static_cast<double>(e.n_paths) : 0.0;
    json j{{"model", is_mg ? "mg" : "gbm"},
           {"n_paths", e.n_paths},
           {"n_steps", e.n_steps},
           {"dt", e.dt},
           {"seed", e.seed},
           {"mean_terminal_s", mean},
           {"discounted_mean_minus_s0", std::exp(-r * e.time(e.n_steps)) * mean - s0}};
    return {csv_of([&](std::ostream& out) { write_ensemble_csv(out, e, max_rows); }), dump(j)};
}

std::string flag(std::optional<bool> b) { return b ? (*b ? "true" : "false") : ""; }

Output classify(const Options& o) {
    const bool is_mg = o.choice("model", {"bs", "mg"}) == "mg";
    const RegimeReport rep = is_mg ? classify_information_flow(mg(o, true), log_variance(o))
                                   : classify_information_flow(market(o));
    const std::string flow = rep.information_preserved ? "preserved" : "leaking";
    std::string csv;
    if (is_mg) {
        const std::vector<std::string> header{"model",         "y",
                                              "volatility_drift", "volatility_drift_zero",
                                              "variance_is_2r", "information_flow"};
        csv = csv_of([&](std::ostream& out) {
            CsvWriter w(out, header);
            w.cell(std::string_view("mg")).cell(*rep.y).cell(*rep.volatility_drift);
            w.cell(flag(rep.volatility_drift_zero)).cell(flag(rep.variance_is_2r)).cell(flow);
            w.end_row();
        });
    } else {
        const std::vector<std::string> header{"model", "sigma_sq_is_2r", "information_flow"};
        csv = csv_of([&](std::ostream& out) {
            CsvWriter w(out, header);
            w.cell(std::string_view("bs")).cell(flag(rep.sigma_sq_is_2r)).cell(flow);
            w.end_row();
        });
    }
    return {csv, to_json(rep)};
}

std::vector<Verb> verbs() {
    const OptionSpec bracket_opt{"bracket", "-10 0", "y bracket for the constraint root", 2};
    return {
        {"bs-vacuum",
         "Black-Scholes vacuum roots at order n",
         join({bs_options(),
               {{"n", std::nullopt, "expansion order"},
                {"regime", "exact", "exact|weak-field|strong-field|extremum"}}}),
         bs_vacuum},
        {"mg-vacuum",
         "Merton-Garman vacuum roots at orders (n, m)",
         join({mg_options(true), y_options(),
               {{"n", std::nullopt, "price order"},
                {"m", std::nullopt, "volatility order"},
                {"regime", "case", "case|strong-strong|weak-weak|strong-x-weak-y|weak-x-strong-y"},
                {"phi-x", std::nullopt, "price field (weak-weak regime)"}}}),
         mg_vacuum},
        {"martingale-check",
         "Residual of a Hamiltonian on its martingale state",
         join({{{"model", "bs", "bs|mg|mg-extended"}},
               {{"r", std::nullopt, "spot rate"}, {"sigma-sq", std::nullopt, "variance (bs)"}},
               mg_options(false),
               {{"grid", "default", "default|custom"},
                {"x-min", std::nullopt, "custom grid"},
                {"x-max", std::nullopt, "custom grid"},
                {"n-points", std::nullopt, "custom grid"},
                {"y-min", std::nullopt, "custom grid (mg)"},
                {"y-max", std::nullopt, "custom grid (mg)"},
                {"m-points", std::nullopt, "custom grid (mg, mg-extended)"},
                {"y-halfwidth", std::nullopt, "custom grid (mg-extended)"},
                {"tol", std::nullopt, "residual tolerance (default 10 h^2 max|state|)"},
                bracket_opt}}),
         martingale_check},
        {"constraint-solve",
         "Log-variance y* where the Merton-Garman Hamiltonian annihilates e^(x+y)",
         join({mg_options(false), {bracket_opt}}),
         constraint_solve},
        {"price",
         "Option price curve by Crank-Nicolson",
         join({bs_options(),
               {{"payoff", std::nullopt, "call|put|bond|asset"},
                {"strike", std::nullopt, "strike (call, put)"},
                {"maturity", "1", "years"},
                {"s0", std::nullopt, "spot"},
                {"barrier", "none", "none|down-and-out|double-knock-out"},
                {"barrier-lo", std::nullopt, "lower barrier, price units"},
                {"barrier-hi", std::nullopt, "upper barrier, price units"},
                {"n-points", "801", "grid nodes"},
                {"x-min", std::nullopt, "log-price grid start (default ln s0 - 6 sigma sqrt T)"},
                {"x-max", std::nullopt, "log-price grid end"},
                {"steps", "0", "time steps (0: T/0.001)"},
                {"smoothing", "2", "implicit start-up steps"}}}),
         price},
        {"evolve",
         "Euclidean or unitary evolution under the Black-Scholes Hamiltonian",
         join({bs_options(),
               {{"mode", "euclidean", "euclidean|unitary"},
                {"dt", "0.001", "time step"},
                {"steps", "1000", "number of steps"},
                {"initial", "gaussian", "gaussian|martingale|bond"},
                {"center", "0", "gaussian center"},
                {"width", "0.5", "gaussian width"},
                {"boundary", "dirichlet-zero", "dirichlet-zero|one-sided"},
                {"x-min", "-4", "grid start"},
                {"x-max", "4", "grid end"},
                {"n-points", "801", "grid nodes"}}}),
         evolve_verb},
        {"simulate",
         "Monte Carlo paths (GBM or Merton-Garman)",
         join({{{"model", "gbm", "gbm|mg"}},
               {{"r", std::nullopt, "spot rate"},
                {"sigma-sq", std::nullopt, "variance (gbm)"},
                {"drift", std::nullopt, "expected return (default r)"}},
               mg_options(false),
               {{"s0", "100", "initial price"},
                {"v0", std::nullopt, "initial variance (mg)"},
                {"horizon", "1", "years"},
                {"dt", "0.01", "time step"},
                {"paths", "1000", "number of paths"},
                {"seed", "1", "random seed"},
                {"workers", "0", "threads (0: all cores); output does not depend on it"},
                {"max-rows", "1000000", "refuse larger ensembles"}}}),
         simulate},
        {"classify",
         "Information-flow regime (Hermiticity flags)",
         join({{{"model", "bs", "bs|mg"}},
               {{"r", std::nullopt, "spot rate"}, {"sigma-sq", std::nullopt, "variance (bs)"}},
               mg_options(false), y_options()}),
         classify},
    };
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

/// Flag values win over config values, which win over defaults.
std::map<std::string, std::string> resolve(
    const Verb& verb, const std::map<std::string, std::vector<std::string>>& flags,
    const KeyValueConfig& config, std::ostream& err) {
    std::map<std::string, std::string> from_config;
    for (const auto& [raw, value] : config.entries()) {
        const std::string key = normalize_key(raw);
        if (key == "tool" || key == "version") continue;
        if (key == "verb") {
            if (value != verb.name) {
                throw InvalidInput("config is for verb '" + value + "', not '" + verb.name + "'");
            }
            continue;
        }
        const bool known = key == "out" || std::any_of(verb.options.begin(), verb.options.end(),
                                                       [&](const auto& s) { return s.name == key; });
        if (!known) {
            err << kTool << ": warning: ignoring config key '" << raw << "'\n";
            continue;
        }
        if (from_config.contains(key)) throw InvalidInput("config key '" + raw + "' repeated");
        from_config[key] = value;
    }

    std::map<std::string, std::string> out;
    auto pick = [&](const std::string& name, const std::optional<std::string>& fallback) {
        if (const auto it = flags.find(name); it != flags.end() && !it->second.empty()) {
            std::string joined;
            for (const auto& v : it->second) joined += (joined.empty() ? "" : " ") + v;
            out[name] = joined;
        } else if (const auto c = from_config.find(name); c != from_config.end()) {
            if (!c->second.empty()) out[name] = c->second;
        } else if (fallback) {
            out[name] = *fallback;
        }
    };
    for (const auto& spec : verb.options) pick(spec.name, spec.fallback);
    pick("out", verb.name + ".csv");
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto table = verbs();
    CLI::App app{"Martingale-as-vacuum lab: vacuum roots, martingale checks, pricing and paths",
                 kTool};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1, 1);

    // verb -> option -> raw values
    std::map<std::string, std::map<std::string, std::vector<std::string>>> flags;
    std::map<std::string, std::string> config_path;
    for (const auto& verb : table) {
        auto* sub = app.add_subcommand(verb.name, verb.description);
        auto& slots = flags[verb.name];
        for (const auto& spec : verb.options) {
            std::string help = spec.help;
            if (spec.fallback) help += " [default: " + *spec.fallback + "]";
            sub->add_option("--" + spec.name, slots[spec.name], help)->expected(spec.arity);
        }
        sub->add_option("--out", slots["out"], "output CSV [default: " + verb.name + ".csv]")
            ->expected(1);
        sub->add_option("--config", config_path[verb.name], "key = value file; flags win");
    }

    if (!args.empty() && !args.front().starts_with("-") &&
        std::none_of(table.begin(), table.end(),
                     [&](const Verb& v) { return v.name == args.front(); })) {
        err << kTool << ": unknown verb '" << args.front() << "'\n\n" << app.help();
        return 2;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << kTool << ": " << e.what() << "\n\n" << app.help();
        return 2;
    }

    const auto* sub = app.get_subcommands().front();
    const auto& verb = *std::find_if(table.begin(), table.end(),
                                     [&](const Verb& v) { return v.name == sub->get_name(); });
    try {
        const auto& cfg_path = config_path[verb.name];
        const KeyValueConfig cfg = cfg_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(cfg_path);
        const Options opts(resolve(verb, flags[verb.name], cfg, err));
        const Output result = verb.handler(opts);

        const std::string path = opts.text("out");
        write_file(path, result.csv);
        KeyValueConfig manifest;
        manifest.set("tool", kTool);
        manifest.set("version", kVersion);
        manifest.set("verb", verb.name);
        for (const auto& [k, v] : opts.values()) manifest.set(k, v);
        std::ostringstream m;
        manifest.write(m);
        write_file(path + ".manifest", m.str());

        out << result.json;
        return 0;
    } catch (const InvalidInput& e) {
        err << kTool << " " << verb.name << ": " << e.what() << "\n\n" << sub->help();
        return 2;
    } catch (const NumericalFailure& e) {
        out << error_json(e.kind(), e.what());
        err << kTool << " " << verb.name << ": " << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << kTool << " " << verb.name << ": " << e.what() << "\n";
        return 2;
    }
}

}  // namespace mvac::cli
