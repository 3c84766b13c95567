#include "mvac/config.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mvac/errors.hpp"
#include "mvac/io.hpp"

namespace mvac {
namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = std::string_view(line);
        if (const auto hash = body.find('#'); hash != std::string_view::npos) {
            body = body.substr(0, hash);
        }
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const auto key = std::string(trim(body.substr(0, eq)));
        const auto value = std::string(trim(body.substr(eq + 1)));
        if (key.empty()) {
            throw InvalidInput("config line " + std::to_string(lineno) + ": empty key");
        }
        if (!cfg.entries_.emplace(key, value).second) {
            throw InvalidInput("config line " + std::to_string(lineno) + ": duplicate key '" +
                               key + "'");
        }
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file " + path.string());
    return parse(in);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    return std::nullopt;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const auto v = get(key);
    if (!v) throw InvalidInput("config: missing key '" + key + "'");
    try {
        return parse_number(*v);
    } catch (const InvalidInput&) {
        throw InvalidInput("config: key '" + key + "' is not a number: '" + *v + "'");
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    return contains(key) ? get_double(key) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key) const {
    const double v = get_double(key);
    const auto i = static_cast<long long>(v);
    if (static_cast<double>(i) != v) {
        throw InvalidInput("config: key '" + key + "' must be an integer");
    }
    return i;
}

void KeyValueConfig::write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
}

MarketParams market_params_from(const KeyValueConfig& cfg) {
    return MarketParams(cfg.get_double("r"), cfg.get_double("sigma_sq"));
}

MGParams mg_params_from(const KeyValueConfig& cfg) {
    MGParams p;
    p.r = cfg.get_double("r", 0.0);
    p.lambda = cfg.get_double("lambda", 0.0);
    p.mu = cfg.get_double("mu", 0.0);
    p.zeta = cfg.get_double("zeta", 0.0);
    p.alpha = cfg.get_double("alpha", 1.0);
    p.rho = cfg.get_double("rho", 0.0);
    p.validate();
    return p;
}

Grid1D grid1d_from(const KeyValueConfig& cfg) {
    const auto n = cfg.get_int("n_points");
    if (n < 3) throw InvalidInput("config: n_points must be at least 3");
    return Grid1D(cfg.get_double("x_min"), cfg.get_double("x_max"), static_cast<std::size_t>(n));
}

Grid2D grid2d_from(const KeyValueConfig& cfg) {
    const auto m = cfg.get_int("m_points");
    if (m < 3) throw InvalidInput("config: m_points must be at least 3");
    return Grid2D(grid1d_from(cfg),
                  Grid1D(cfg.get_double("y_min"), cfg.get_double("y_max"),
                         static_cast<std::size_t>(m)));
}

}  // namespace mvac
