#pragma once

// Monte Carlo paths for geometric Brownian motion and the Merton-Garman pair.
//
// Random numbers come from Philox4x32-10 keyed by the run seed, with the
// counter carrying (draw index, path index). Every path therefore owns an
// independent substream and ensembles are bit-identical for any worker count.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mvac/model.hpp"

namespace mvac {

/// Philox4x32 with ten rounds (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) noexcept;
};

/// Standard normals for one path, via Box-Muller on 53-bit uniforms.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path) noexcept;

    double next() noexcept;

    /// Uniform on (0, 1].
    double uniform() noexcept;

private:
    void refill() noexcept;

    Philox4x32::Key key_;
    std::uint64_t path_;
    std::uint64_t draw_ = 0;
    std::array<std::uint32_t, 4> bits_{};
    int bits_left_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Row-major paths: value(p, k) for path p at time index k.
struct PathEnsemble {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> s;
    std::vector<double> v;  ///< empty for GBM

    bool has_variance() const noexcept { return !v.empty(); }
    double s_at(std::size_t p, std::size_t k) const noexcept { return s[p * (n_steps + 1) + k]; }
    double v_at(std::size_t p, std::size_t k) const noexcept { return v[p * (n_steps + 1) + k]; }
    double time(std::size_t k) const noexcept;
};

/// Largest n_paths·(n_steps+1) an ensemble may hold.
inline constexpr std::size_t kMaxEnsembleValues = std::size_t{1} << 27;

/// Steps used for horizon T at nominal step dt (T/dt rounded up).
std::size_t step_count(double horizon, double dt);

/// Runs body(begin, end) over [0, n) on up to `workers` threads
/// (0 = hardware concurrency).
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Log-exact GBM: S_k = s0·exp((μ − σ²/2)t_k + σW_k). Base must be MarketParams.
PathEnsemble simulate_gbm(const SDEParams& sp, double s0, double horizon, double dt,
                          std::size_t n_paths, std::uint64_t seed, unsigned workers = 0);

/// One time step of the Merton-Garman pair, shared by the path generator and
/// the streaming Monte Carlo checks.
class MGStepper {
public:
    struct State {
        double log_s;
        double var;
    };

    MGStepper(const MGParams& p, double drift, double dt);

    /// Draws two normals from z. Throws NumericalFailure if the path diverges.
    void advance(State& st, NormalStream& z) const;

private:
    MGParams p_;
    double drift_;
    double dt_;
    double sqrt_dt_;
    double rho_perp_;
};

/// Merton-Garman pair: log-Euler for S, Euler with reflection at 0 for V.
PathEnsemble simulate_mg(const MGParams& p, double drift, double s0, double v0, double horizon,
                         double dt, std::size_t n_paths, std::uint64_t seed,
                         unsigned workers = 0);

/// Long format "path_id,t,S[,V]". Throws InvalidInput when the ensemble holds
/// more than max_rows rows.
void write_ensemble_csv(std::ostream& out, const PathEnsemble& e, std::size_t max_rows);

}  // namespace mvac
