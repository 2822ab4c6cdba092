#pragma once

// Seeded Monte Carlo reference pricer for the averaged payoffs. Paths use
// exact Gaussian (and exact OU) transitions between grid dates, antithetic
// mirroring on the price driver, and chunked counter-based seeding so results
// are identical for any worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "asianbounds/curves.hpp"
#include "asianbounds/grids.hpp"
#include "asianbounds/numerics.hpp"
#include "asianbounds/rng.hpp"
#include "asianbounds/volume.hpp"

namespace asianbounds {

struct McConfig {
    std::uint64_t paths = 1'000'000;
    std::uint64_t seed = 0;
    bool antithetic = true;  ///< mirror the price driver within sample pairs
    unsigned workers = 0;    ///< 0 = all hardware threads
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline constexpr std::uint64_t kChunkSamples = std::uint64_t{1} << 16;

/// Runs fn(chunk_index, samples_in_chunk) over a fixed chunk layout; chunks
/// are claimed dynamically but outputs must be written to per-chunk slots and
/// reduced in index order by the caller.
template <class ChunkFn>
void run_chunked(std::uint64_t samples, unsigned workers, ChunkFn&& fn) {
    const std::size_t chunks =
        static_cast<std::size_t>((samples + kChunkSamples - 1) / kChunkSamples);
    auto body = [&](std::size_t chunk) {
        const std::uint64_t first = static_cast<std::uint64_t>(chunk) * kChunkSamples;
        fn(chunk, std::min(kChunkSamples, samples - first));
    };
    unsigned n_workers = workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : workers;
    if (chunks < n_workers) n_workers = static_cast<unsigned>(chunks);
    if (n_workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= chunks) return;
                try {
                    body(c);
                } catch (...) {
                    std::scoped_lock lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// Exact per-step log-price increments for a curve/grid pair.
struct PriceSteps {
    std::vector<double> drift;  ///< dR_j - sigma^2 dt_j / 2
    std::vector<double> vol;    ///< sigma sqrt(dt_j)
    double discount = 1.0;      ///< e^{-R_T}

    static PriceSteps build(const RateCurve& curve, double sigma, const MonitoringGrid& grid) {
        PriceSteps steps;
        const std::size_t n = grid.size();
        steps.drift.resize(n);
        steps.vol.resize(n);
        double prev_t = 0.0, prev_r = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double r = integrated_rate(curve, grid.dates[j]);
            const double dt = grid.dates[j] - prev_t;
            steps.drift[j] = (r - prev_r) - 0.5 * sigma * sigma * dt;
            steps.vol[j] = sigma * std::sqrt(dt);
            prev_t = grid.dates[j];
            prev_r = r;
        }
        steps.discount = discount_factor(curve, grid.maturity);
        return steps;
    }
};

inline McEstimate reduce_chunks(const std::vector<double>& sums,
                                const std::vector<double>& sumsqs, std::uint64_t samples,
                                std::uint64_t path_count, std::uint64_t seed) {
    long double total = 0.0L, total_sq = 0.0L;
    for (std::size_t c = 0; c < sums.size(); ++c) {
        total += sums[c];
        total_sq += sumsqs[c];
    }
    McEstimate est;
    const long double n = static_cast<long double>(samples);
    const long double mean = total / n;
    est.mean = static_cast<double>(mean);
    long double var = 0.0L;
    if (samples > 1) var = std::max((total_sq - total * total / n) / (n - 1.0L), 0.0L);
    // the two-term cancellation leaves junk up to ~n eps mean^2 when the
    // payoff is constant; report that as exactly zero
    if (var < 8.0L * n * std::numeric_limits<double>::epsilon() * mean * mean) var = 0.0L;
    est.std_error = static_cast<double>(std::sqrt(var / n));
    est.paths = path_count;
    est.seed = seed;
    return est;
}

inline std::uint64_t sample_count(const McConfig& cfg, const char* what) {
    const std::uint64_t samples = cfg.antithetic ? cfg.paths / 2 : cfg.paths;
    if (samples < 2)
        throw std::invalid_argument(std::string(what) +
                                    ": too few paths to estimate a standard error");
    return samples;
}

}  // namespace detail

/// Reference price of the averaged payoff (sum_i p_i S_{u_i} - K)^+ discounted
/// to time zero.
inline McEstimate mc_asian_price(const RateCurve& curve, double sigma, double spot,
                                 double strike, const MonitoringGrid& grid,
                                 const McConfig& cfg) {
    if (!(spot > 0.0)) throw std::invalid_argument("mc_asian_price: spot must be > 0");
    if (strike < 0.0) throw std::invalid_argument("mc_asian_price: strike must be >= 0");
    if (sigma < 0.0) throw std::invalid_argument("mc_asian_price: sigma must be >= 0");
    const std::uint64_t samples = detail::sample_count(cfg, "mc_asian_price");
    const auto steps = detail::PriceSteps::build(curve, sigma, grid);
    const std::size_t n = grid.size();
    const std::vector<double>& pw = grid.payoff_weights;
    const std::size_t chunks =
        static_cast<std::size_t>((samples + detail::kChunkSamples - 1) / detail::kChunkSamples);
    std::vector<double> sums(chunks, 0.0), sumsqs(chunks, 0.0);
    detail::run_chunked(samples, cfg.workers, [&](std::size_t chunk, std::uint64_t count) {
        Xoshiro256pp rng(derive_seed(cfg.seed, chunk, 0));
        const ZigguratNormal normal;
        double acc = 0.0, acc_sq = 0.0;
        for (std::uint64_t k = 0; k < count; ++k) {
            double x_up = 0.0, x_dn = 0.0, avg_up = 0.0, avg_dn = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double z = normal(rng);
                x_up += steps.drift[j] + steps.vol[j] * z;
                avg_up += pw[j] * fast_exp(x_up);
                if (cfg.antithetic) {
                    x_dn += steps.drift[j] - steps.vol[j] * z;
                    avg_dn += pw[j] * fast_exp(x_dn);
                }
            }
            double payoff = std::max(spot * avg_up - strike, 0.0) * steps.discount;
            if (cfg.antithetic)
                payoff = 0.5 * (payoff + std::max(spot * avg_dn - strike, 0.0) * steps.discount);
            acc += payoff;
            acc_sq += payoff * payoff;
        }
        sums[chunk] = acc;
        sumsqs[chunk] = acc_sq;
    });
    return detail::reduce_chunks(sums, sumsqs, samples,
                                 cfg.antithetic ? 2 * samples : samples, cfg.seed);
}

/// Reference price of the VWAP payoff (sum_j w_j S_j U_j / sum_k w_k U_k - K)^+
/// with the price and volume drivers independent. Antithetic pairs share the
/// volume path and mirror the price driver only.
inline McEstimate mc_vwap_price(const RateCurve& curve, double sigma, double spot,
                                double strike, const MonitoringGrid& grid,
                                const VolumeModel& volume, const McConfig& cfg) {
    if (!(spot > 0.0)) throw std::invalid_argument("mc_vwap_price: spot must be > 0");
    if (strike < 0.0) throw std::invalid_argument("mc_vwap_price: strike must be >= 0");
    if (sigma < 0.0) throw std::invalid_argument("mc_vwap_price: sigma must be >= 0");
    validate(volume);
    const std::uint64_t samples = detail::sample_count(cfg, "mc_vwap_price");
    const auto steps = detail::PriceSteps::build(curve, sigma, grid);
    const auto ou = detail::OuTransition::build(volume, grid);
    const std::size_t n = grid.size();
    const std::vector<double>& w = grid.indicator_weights;
    const std::size_t chunks =
        static_cast<std::size_t>((samples + detail::kChunkSamples - 1) / detail::kChunkSamples);
    std::vector<double> sums(chunks, 0.0), sumsqs(chunks, 0.0);
    detail::run_chunked(samples, cfg.workers, [&](std::size_t chunk, std::uint64_t count) {
        Xoshiro256pp rng_price(derive_seed(cfg.seed, chunk, 0));
        Xoshiro256pp rng_vol(derive_seed(cfg.seed, chunk, 1));
        const ZigguratNormal normal;
        double acc = 0.0, acc_sq = 0.0;
        for (std::uint64_t k = 0; k < count; ++k) {
            double y = volume.initial_level;
            double x_up = 0.0, x_dn = 0.0;
            double num_up = 0.0, num_dn = 0.0, den = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                y = volume.long_run_level + (y - volume.long_run_level) * ou.decay[j] +
                    ou.shock[j] * normal(rng_vol);
                const double u = y * y;
                const double z = normal(rng_price);
                x_up += steps.drift[j] + steps.vol[j] * z;
                const double wu = w[j] * u;
                num_up += wu * fast_exp(x_up);
                den += wu;
                if (cfg.antithetic) {
                    x_dn += steps.drift[j] - steps.vol[j] * z;
                    num_dn += wu * fast_exp(x_dn);
                }
            }
            if (!(den > 0.0))
                throw std::runtime_error("mc_vwap_price: degenerate volume path (zero average)");
            double payoff = std::max(spot * num_up / den - strike, 0.0) * steps.discount;
            if (cfg.antithetic)
                payoff =
                    0.5 * (payoff + std::max(spot * num_dn / den - strike, 0.0) * steps.discount);
            acc += payoff;
            acc_sq += payoff * payoff;
        }
        sums[chunk] = acc;
        sumsqs[chunk] = acc_sq;
    });
    return detail::reduce_chunks(sums, sumsqs, samples,
                                 cfg.antithetic ? 2 * samples : samples, cfg.seed);
}

}  // namespace asianbounds
