#pragma once

// Reference values computed without the library: closed-form prices,
// textbook quadratic roots, a sign-scan root finder and a barrier Monte Carlo.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double bs_call(double s, double k, double r, double sigma_sq, double t) {
    const double sd = std::sqrt(sigma_sq * t);
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma_sq) * t) / sd;
    return s * norm_cdf(d1) - k * std::exp(-r * t) * norm_cdf(d1 - sd);
}

inline double bs_put(double s, double k, double r, double sigma_sq, double t) {
    const double sd = std::sqrt(sigma_sq * t);
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma_sq) * t) / sd;
    return k * std::exp(-r * t) * norm_cdf(sd - d1) - s * norm_cdf(-d1);
}

/// Continuously monitored down-and-out call, barrier b ≤ strike k.
inline double down_and_out_call(double s, double k, double b, double r, double sigma_sq,
                                double t) {
    const double sd = std::sqrt(sigma_sq * t);
    const double lam = (r + 0.5 * sigma_sq) / sigma_sq;
    const double y = std::log(b * b / (s * k)) / sd + lam * sd;
    const double knock_in = s * std::pow(b / s, 2.0 * lam) * norm_cdf(y) -
                            k * std::exp(-r * t) * std::pow(b / s, 2.0 * lam - 2.0) *
                                norm_cdf(y - sd);
    return bs_call(s, k, r, sigma_sq, t) - knock_in;
}

/// Textbook (−b ± √disc)/2a, larger root first; empty if complex.
inline std::vector<double> quadratic(double a, double b, double c) {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return {};
    const double s = std::sqrt(disc);
    const double r1 = (-b + s) / (2.0 * a);
    const double r2 = (-b - s) / (2.0 * a);
    return r1 >= r2 ? std::vector<double>{r1, r2} : std::vector<double>{r2, r1};
}

/// Scan [lo, hi] at the given step for sign changes (and exact zeros), then bisect.
inline std::vector<double> scan_bisect(const std::function<double(double)>& f, double lo,
                                       double hi, double step) {
    std::vector<double> roots;
    const auto n = static_cast<long>(std::floor((hi - lo) / step));
    double a = lo;
    double fa = f(a);
    for (long i = 1; i <= n; ++i) {
        const double b = lo + static_cast<double>(i) * step;
        const double fb = f(b);
        if (fa == 0.0) {
            roots.push_back(a);
        } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            double x0 = a;
            double x1 = b;
            double f0 = fa;
            for (int it = 0; it < 200 && x1 - x0 > 1e-15 * (1.0 + std::abs(x0)); ++it) {
                const double mid = 0.5 * (x0 + x1);
                const double fm = f(mid);
                if (fm == 0.0) {
                    x0 = x1 = mid;
                    break;
                }
                if ((fm < 0.0) == (f0 < 0.0)) {
                    x0 = mid;
                    f0 = fm;
                } else {
                    x1 = mid;
                }
            }
            roots.push_back(0.5 * (x0 + x1));
        }
        a = b;
        fa = fb;
    }
    if (fa == 0.0) roots.push_back(a);
    return roots;
}

struct McEstimate {
    double mean;
    double standard_error;
};

/// Down-and-out call by exact log-normal steps with a Brownian-bridge
/// survival weight per step (continuous monitoring). Streams paths.
inline McEstimate down_and_out_call_mc(double s0, double k, double b, double r, double sigma_sq,
                                       double t, std::size_t n_paths, std::size_t n_steps,
                                       std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    const double dt = t / static_cast<double>(n_steps);
    const double drift = (r - 0.5 * sigma_sq) * dt;
    const double vol = std::sqrt(sigma_sq * dt);
    const double log_b = std::log(b);
    const double log_k = std::log(k);
    const double discount = std::exp(-r * t);
    const double bridge = -2.0 / (sigma_sq * dt);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        double x = std::log(s0);
        double weight = 1.0;
        for (std::size_t j = 0; j < n_steps; ++j) {
            const double next = x + drift + vol * normal(gen);
            if (next <= log_b) {
                weight = 0.0;
                break;
            }
            const double arg = bridge * (x - log_b) * (next - log_b);
            if (arg > -50.0) weight *= 1.0 - std::exp(arg);
            x = next;
        }
        const double payoff = x > log_k ? weight * discount * (std::exp(x) - k) : 0.0;
        sum += payoff;
        sum_sq += payoff * payoff;
    }
    const double n = static_cast<double>(n_paths);
    const double mean = sum / n;
    const double var = (sum_sq - n * mean * mean) / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

/// Small deterministic generator for property sweeps.
class Draws {
public:
    explicit Draws(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

private:
    std::mt19937_64 gen_;
};

}  // namespace oracle
