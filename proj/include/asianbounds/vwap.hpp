#pragma once

// VWAP options: Monte Carlo estimation of the expected volume weights
// g_i = E[U_i / U-bar] and assembly of the VWAP bounds on top of the Gaussian
// engine. Independence of price and volume lets g factor out of every Gaussian
// expectation, so a VWAP grid is a plain grid with g-tilted payoff weights.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asianbounds/gaussian_bounds.hpp"
#include "asianbounds/mc_oracle.hpp"
#include "asianbounds/volume.hpp"

namespace asianbounds {

struct GEstimate {
    std::vector<double> g;          ///< g_i = E[U_i / U-bar], >= 0
    std::vector<double> std_error;  ///< per-coordinate standard error
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
};

/// One exact volume path at the grid dates, U_i = Y_{u_i}^2.
inline std::vector<double> simulate_volume_path(const VolumeModel& model,
                                                const MonitoringGrid& grid,
                                                std::uint64_t seed) {
    validate(model);
    const auto ou = detail::OuTransition::build(model, grid);
    Xoshiro256pp rng(derive_seed(seed, 0, 1));
    const ZigguratNormal normal;
    std::vector<double> out(grid.size());
    double y = model.initial_level;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        y = model.long_run_level + (y - model.long_run_level) * ou.decay[j] +
            ou.shock[j] * normal(rng);
        out[j] = y * y;
    }
    return out;
}

/// Monte Carlo estimate of g_i = E[U_i / U-bar] with U-bar = sum_j w_j U_j.
/// Deterministic given the seed, independent of the worker count.
inline GEstimate estimate_g(const VolumeModel& model, const MonitoringGrid& grid,
                            std::uint64_t paths, std::uint64_t seed, unsigned workers = 0) {
    validate(model);
    if (paths < 1) throw std::invalid_argument("estimate_g: need at least one path");
    const auto ou = detail::OuTransition::build(model, grid);
    const std::size_t n = grid.size();
    const std::vector<double>& w = grid.indicator_weights;
    const std::size_t chunks =
        static_cast<std::size_t>((paths + detail::kChunkSamples - 1) / detail::kChunkSamples);
    std::vector<double> sums(chunks * n, 0.0), sumsqs(chunks * n, 0.0);
    detail::run_chunked(paths, workers, [&](std::size_t chunk, std::uint64_t count) {
        Xoshiro256pp rng(derive_seed(seed, chunk, 1));
        const ZigguratNormal normal;
        std::vector<double> u(n);
        double* s = &sums[chunk * n];
        double* q = &sumsqs[chunk * n];
        for (std::uint64_t k = 0; k < count; ++k) {
            double y = model.initial_level;
            long double ubar = 0.0L;
            for (std::size_t j = 0; j < n; ++j) {
                y = model.long_run_level + (y - model.long_run_level) * ou.decay[j] +
                    ou.shock[j] * normal(rng);
                u[j] = y * y;
                ubar += static_cast<long double>(w[j]) * u[j];
            }
            if (!(ubar > 0.0L))
                throw std::runtime_error("estimate_g: degenerate volume path (zero average)");
            const double inv = 1.0 / static_cast<double>(ubar);
            for (std::size_t j = 0; j < n; ++j) {
                const double ratio = u[j] * inv;
                s[j] += ratio;
                q[j] += ratio * ratio;
            }
        }
    });
    GEstimate est;
    est.g.resize(n);
    est.std_error.resize(n);
    est.paths = paths;
    est.seed = seed;
    const long double np = static_cast<long double>(paths);
    for (std::size_t j = 0; j < n; ++j) {
        long double total = 0.0L, total_sq = 0.0L;
        for (std::size_t c = 0; c < chunks; ++c) {
            total += sums[c * n + j];
            total_sq += sumsqs[c * n + j];
        }
        est.g[j] = static_cast<double>(total / np);
        long double var = 0.0L;
        if (paths > 1) var = std::max((total_sq - total * total / np) / (np - 1.0L), 0.0L);
        est.std_error[j] = static_cast<double>(std::sqrt(var / np));
    }
    return est;
}

/// Grid with payoff weights tilted by the expected volume profile,
/// p_i = g_i w_i renormalized; indicator weights unchanged.
inline MonitoringGrid vwap_payoff_grid(const MonitoringGrid& grid, const GEstimate& g) {
    if (g.g.size() != grid.size())
        throw std::invalid_argument("vwap_payoff_grid: g estimate does not match the grid");
    std::vector<double> p(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        p[i] = g.g[i] * grid.indicator_weights[i];
    return with_payoff_weights(grid, p);
}

/// VWAP bounds: payoff weights become p_i = g_i w_i (renormalized), the
/// indicator average stays on the raw weights, and the Gaussian engine does
/// the rest.
inline std::pair<BoundResult, BoundResult> vwap_bounds(const RateCurve& curve, double sigma,
                                                       double spot, double strike,
                                                       const MonitoringGrid& grid,
                                                       const GEstimate& g,
                                                       const BoundsConfig& cfg = {}) {
    if (!(spot > 0.0)) throw std::invalid_argument("vwap_bounds: spot must be > 0");
    if (!(strike > 0.0)) throw std::invalid_argument("vwap_bounds: strike must be > 0");
    const MonitoringGrid weighted = vwap_payoff_grid(grid, g);
    const GaussianAvgModel model = build_model(curve, sigma, weighted);
    const double moneyness = strike / spot;
    return {lb1(model, moneyness, spot, cfg), ub1(model, moneyness, spot, cfg)};
}

/// Writes rows "date g" so an expensive estimate can be cached.
inline void save_g_estimate(const std::string& path, const MonitoringGrid& grid,
                            const GEstimate& est) {
    if (est.g.size() != grid.size())
        throw std::invalid_argument("save_g_estimate: g estimate does not match the grid");
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("save_g_estimate: cannot open " + path);
    out.precision(17);
    for (std::size_t i = 0; i < grid.size(); ++i)
        out << grid.dates[i] << ' ' << est.g[i] << '\n';
}

/// Reads rows "date g" written by save_g_estimate; the dates must match the
/// grid. Standard errors are not stored, so they load as zero.
inline GEstimate load_g_estimate(const std::string& path, const MonitoringGrid& grid) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_g_estimate: cannot open " + path);
    GEstimate est;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (auto& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ss(line);
        double u = 0.0, gv = 0.0;
        if (ss >> u >> gv) {
            const std::size_t i = est.g.size();
            if (i >= grid.size())
                throw std::invalid_argument("load_g_estimate: more rows than grid dates");
            if (std::abs(u - grid.dates[i]) > 1e-9 * std::max(1.0, std::abs(grid.dates[i])))
                throw std::invalid_argument("load_g_estimate: date mismatch at row " +
                                            std::to_string(i));
            if (!(gv >= 0.0))
                throw std::invalid_argument("load_g_estimate: negative weight at row " +
                                            std::to_string(i));
            est.g.push_back(gv);
        }
    }
    if (est.g.size() != grid.size())
        throw std::invalid_argument("load_g_estimate: row count does not match the grid");
    est.std_error.assign(grid.size(), 0.0);
    return est;
}

}  // namespace asianbounds
