#include "mvac/sde.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <ostream>
#include <thread>

#include "mvac/errors.hpp"
#include "mvac/io.hpp"

namespace mvac {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

void validate_sizes(double s0, double horizon, double dt, std::size_t n_paths) {
    if (!(s0 > 0.0) || !std::isfinite(s0)) throw InvalidInput("s0 must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidInput("horizon must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");
    if (n_paths == 0) throw InvalidInput("n_paths must be positive");
}

void check_capacity(std::size_t n_paths, std::size_t n_steps) {
    if (n_paths > kMaxEnsembleValues / (n_steps + 1)) {
        throw InvalidInput("ensemble too large to store; reduce n_paths or the step count");
    }
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t path) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      path_(path) {}

void NormalStream::refill() noexcept {
    bits_ = Philox4x32::block({static_cast<std::uint32_t>(draw_),
                               static_cast<std::uint32_t>(draw_ >> 32),
                               static_cast<std::uint32_t>(path_),
                               static_cast<std::uint32_t>(path_ >> 32)},
                              key_);
    ++draw_;
    bits_left_ = 2;
}

double NormalStream::uniform() noexcept {
    if (bits_left_ == 0) refill();
    const int k = 2 - bits_left_;
    --bits_left_;
    const std::uint64_t word = (static_cast<std::uint64_t>(bits_[2 * k]) << 32) | bits_[2 * k + 1];
    return (static_cast<double>(word >> 11) + 1.0) * 0x1.0p-53;
}

double NormalStream::next() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(theta);
    has_spare_ = true;
    return radius * std::cos(theta);
}

double PathEnsemble::time(std::size_t k) const noexcept {
    if (k == n_steps) return dt * static_cast<double>(n_steps);
    return dt * static_cast<double>(k);
}

std::size_t step_count(double horizon, double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0)) throw InvalidInput("step_count: need horizon, dt > 0");
    const double ratio = horizon / dt;
    if (!(ratio < 1e12)) throw InvalidInput("step_count: too many steps");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12))));
}

void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t chunks = std::min<std::size_t>(workers, n);
    if (chunks <= 1) {
        if (n > 0) body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(chunks - 1);
    const std::size_t per = (n + chunks - 1) / chunks;
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto run = [&](std::size_t b, std::size_t e) {
        try {
            body(b, e);
        } catch (...) {
            std::lock_guard lock(failure_lock);
            if (!failure) failure = std::current_exception();
        }
    };
    for (std::size_t c = 1; c < chunks; ++c) {
        const std::size_t b = c * per;
        const std::size_t e = std::min(n, b + per);
        if (b < e) pool.emplace_back(run, b, e);
    }
    run(0, std::min(n, per));
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

PathEnsemble simulate_gbm(const SDEParams& sp, double s0, double horizon, double dt,
                          std::size_t n_paths, std::uint64_t seed, unsigned workers) {
    validate_sizes(s0, horizon, dt, n_paths);
    const auto* market = std::get_if<MarketParams>(&sp.base);
    if (market == nullptr) throw InvalidInput("simulate_gbm: base must be MarketParams");
    if (!std::isfinite(sp.expected_return)) throw InvalidInput("expected_return must be finite");

    const std::size_t steps = step_count(horizon, dt);
    check_capacity(n_paths, steps);
    PathEnsemble e;
    e.n_paths = n_paths;
    e.n_steps = steps;
    e.dt = horizon / static_cast<double>(steps);
    e.seed = seed;
    e.s.resize(n_paths * (steps + 1));

    const double sigma = market->sigma();
    const double mu = sp.expected_return - 0.5 * market->sigma_sq();
    const double sqrt_dt = std::sqrt(e.dt);
    parallel_for(n_paths, workers, [&](std::size_t b, std::size_t end) {
        for (std::size_t p = b; p < end; ++p) {
            NormalStream z(seed, p);
            double* row = &e.s[p * (steps + 1)];
            row[0] = s0;
            double w = 0.0;
            for (std::size_t k = 1; k <= steps; ++k) {
                w += sqrt_dt * z.next();
                const double t = horizon * static_cast<double>(k) / static_cast<double>(steps);
                row[k] = s0 * std::exp(mu * t + sigma * w);
            }
        }
    });
    return e;
}

MGStepper::MGStepper(const MGParams& p, double drift, double dt)
    : p_(p), drift_(drift), dt_(dt), sqrt_dt_(std::sqrt(dt)),
      rho_perp_(std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho))) {}

void MGStepper::advance(State& st, NormalStream& z) const {
    const double z1 = z.next();
    const double z2 = p_.rho * z1 + rho_perp_ * z.next();
    const double var = st.var;
    const double vol_term = var > 0.0 ? std::pow(var, p_.alpha) : (p_.alpha > 0.0 ? 0.0 : 1.0);
    st.log_s += (drift_ - 0.5 * var) * dt_ + std::sqrt(var) * sqrt_dt_ * z1;
    st.var = std::abs(var + (p_.lambda + p_.mu * var) * dt_ + p_.zeta * vol_term * sqrt_dt_ * z2);
    if (!std::isfinite(st.var) || !std::isfinite(st.log_s)) {
        throw NumericalFailure("non-finite", "Merton-Garman path diverged");
    }
}

PathEnsemble simulate_mg(const MGParams& p, double drift, double s0, double v0, double horizon,
                         double dt, std::size_t n_paths, std::uint64_t seed, unsigned workers) {
    p.validate();
    validate_sizes(s0, horizon, dt, n_paths);
    if (!(v0 > 0.0) || !std::isfinite(v0)) throw InvalidInput("v0 must be positive");
    if (!std::isfinite(drift)) throw InvalidInput("drift must be finite");

    const std::size_t steps = step_count(horizon, dt);
    check_capacity(n_paths, steps);
    PathEnsemble e;
    e.n_paths = n_paths;
    e.n_steps = steps;
    e.dt = horizon / static_cast<double>(steps);
    e.seed = seed;
    e.s.resize(n_paths * (steps + 1));
    e.v.resize(n_paths * (steps + 1));

    const MGStepper stepper(p, drift, e.dt);
    parallel_for(n_paths, workers, [&](std::size_t b, std::size_t end) {
        for (std::size_t path = b; path < end; ++path) {
            NormalStream z(seed, path);
            double* srow = &e.s[path * (steps + 1)];
            double* vrow = &e.v[path * (steps + 1)];
            MGStepper::State st{std::log(s0), v0};
            srow[0] = s0;
            vrow[0] = v0;
            for (std::size_t k = 1; k <= steps; ++k) {
                stepper.advance(st, z);
                srow[k] = std::exp(st.log_s);
                vrow[k] = st.var;
            }
        }
    });
    return e;
}

void write_ensemble_csv(std::ostream& out, const PathEnsemble& e, std::size_t max_rows) {
    const std::size_t rows = e.n_paths * (e.n_steps + 1);
    if (rows > max_rows) {
        throw InvalidInput("ensemble has " + std::to_string(rows) +
                           " rows, above the export limit of " + std::to_string(max_rows));
    }
    std::vector<std::string> header{"path_id", "t", "S"};
    if (e.has_variance()) header.emplace_back("V");
    CsvWriter csv(out, header);
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        for (std::size_t k = 0; k <= e.n_steps; ++k) {
            csv.cell(static_cast<long long>(p)).cell(e.time(k)).cell(e.s_at(p, k));
            if (e.has_variance()) csv.cell(e.v_at(p, k));
            csv.end_row();
        }
    }
}

}  // namespace mvac
