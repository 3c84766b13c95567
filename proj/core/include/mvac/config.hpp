#pragma once

// Plain-text key-value configuration:
//
//   # comment
//   r = 0.05
//   sigma_sq = 0.04
//
// Documented model keys: r, sigma_sq, lambda, mu, zeta, alpha, rho,
// x_min, x_max, n_points, y_min, y_max, m_points. Other keys are kept
// verbatim so callers (the CLI) can use the same file for their options.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "mvac/model.hpp"

namespace mvac {

class KeyValueConfig {
public:
    KeyValueConfig() = default;

    /// Throws InvalidInput on a malformed line or a duplicated key.
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::filesystem::path& path);

    bool contains(const std::string& key) const { return entries_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;

    /// Throws InvalidInput when the key is missing or not a number.
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;

    void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    /// Writes "key = value" lines in key order.
    void write(std::ostream& out) const;

private:
    std::map<std::string, std::string> entries_;
};

MarketParams market_params_from(const KeyValueConfig& cfg);

/// Missing MG keys default to zero (alpha defaults to 1).
MGParams mg_params_from(const KeyValueConfig& cfg);

/// Reads x_min, x_max, n_points.
Grid1D grid1d_from(const KeyValueConfig& cfg);

/// Reads x_min, x_max, n_points for x and y_min, y_max, m_points for y.
Grid2D grid2d_from(const KeyValueConfig& cfg);

}  // namespace mvac
