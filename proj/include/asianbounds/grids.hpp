#pragma once

// Monitoring schemes: the averaging measure as a finite date grid carrying two
// weight vectors. The payoff weights p average the payoff terms; the indicator
// weights w define the average inside indicator events. Plain Asian grids have
// p = w; VWAP grids carry the expected volume profile in p only.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asianbounds/numerics.hpp"

namespace asianbounds {

enum class GridMode { discrete, continuous_approx };

struct MonitoringGrid {
    double maturity = 0.0;                  ///< T in years
    std::vector<double> dates;              ///< u_1 < ... < u_N in (0, T]
    std::vector<double> payoff_weights;     ///< p, sums to 1
    std::vector<double> indicator_weights;  ///< w, sums to 1
    GridMode mode = GridMode::discrete;

    std::size_t size() const { return dates.size(); }
};

namespace detail {

inline std::vector<double> normalized_weights(std::span<const double> raw, const char* what) {
    long double sum = 0.0L;
    for (double v : raw) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(what) + ": weights must be finite and >= 0");
        sum += v;
    }
    if (!(sum > 0.0L)) throw std::invalid_argument(std::string(what) + ": weights sum to zero");
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        out[i] = static_cast<double>(raw[i] / sum);
    return out;
}

inline void validate_dates(const std::vector<double>& dates, double maturity, const char* what) {
    if (dates.empty()) throw std::invalid_argument(std::string(what) + ": empty date grid");
    if (!(maturity > 0.0)) throw std::invalid_argument(std::string(what) + ": need T > 0");
    double prev = 0.0;
    for (double u : dates) {
        if (!std::isfinite(u) || u <= 0.0)
            throw std::invalid_argument(std::string(what) + ": dates must be positive");
        if (u <= prev)
            throw std::invalid_argument(std::string(what) +
                                        ": dates must be strictly increasing (duplicates are an error)");
        prev = u;
    }
    if (dates.back() > maturity * (1.0 + 1e-12))
        throw std::invalid_argument(std::string(what) + ": last date exceeds maturity");
}

}  // namespace detail

/// Uniform discrete monitoring: dates u_i = i T / N, both weight vectors 1/N.
inline MonitoringGrid uniform_discrete(double maturity, std::size_t n) {
    if (n < 1) throw std::invalid_argument("uniform_discrete: need N >= 1");
    if (!(maturity > 0.0)) throw std::invalid_argument("uniform_discrete: need T > 0");
    MonitoringGrid grid;
    grid.maturity = maturity;
    grid.mode = GridMode::discrete;
    grid.dates.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        grid.dates[i] = (static_cast<double>(i + 1) * maturity) / static_cast<double>(n);
    grid.dates.back() = maturity;
    grid.payoff_weights.assign(n, 1.0 / static_cast<double>(n));
    grid.indicator_weights = grid.payoff_weights;
    return grid;
}

/// Continuous uniform monitoring, discretized by an M-node Gauss-Legendre rule
/// on (0, T). The grid is flagged continuous_approx so the Gaussian model uses
/// the exact continuous-limit covariances at those dates.
inline MonitoringGrid continuous_uniform_approx(double maturity, std::size_t m) {
    if (m < 2) throw std::invalid_argument("continuous_uniform_approx: need M >= 2");
    if (!(maturity > 0.0)) throw std::invalid_argument("continuous_uniform_approx: need T > 0");
    const QuadratureRule& rule = gauss_legendre_rule(m);
    MonitoringGrid grid;
    grid.maturity = maturity;
    grid.mode = GridMode::continuous_approx;
    grid.dates.resize(m);
    grid.payoff_weights.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        grid.dates[i] = 0.5 * maturity * (rule.nodes[i] + 1.0);
        grid.payoff_weights[i] = 0.5 * rule.weights[i];  // Legendre weights sum to 2
    }
    grid.payoff_weights = detail::normalized_weights(grid.payoff_weights, "continuous_uniform_approx");
    grid.indicator_weights = grid.payoff_weights;
    return grid;
}

/// Grid with explicit dates and one weight vector applied to both p and w.
inline MonitoringGrid custom_grid(double maturity, std::vector<double> dates,
                                  std::span<const double> weights) {
    if (dates.size() != weights.size())
        throw std::invalid_argument("custom_grid: dates/weights length mismatch");
    detail::validate_dates(dates, maturity, "custom_grid");
    MonitoringGrid grid;
    grid.maturity = maturity;
    grid.mode = GridMode::discrete;
    grid.dates = std::move(dates);
    grid.payoff_weights = detail::normalized_weights(weights, "custom_grid");
    grid.indicator_weights = grid.payoff_weights;
    return grid;
}

/// Replaces the payoff weights after renormalizing them to sum 1; the
/// indicator weights are left untouched.
inline MonitoringGrid with_payoff_weights(const MonitoringGrid& grid, std::span<const double> p) {
    if (p.size() != grid.size())
        throw std::invalid_argument("with_payoff_weights: weight length mismatch");
    MonitoringGrid out = grid;
    out.payoff_weights = detail::normalized_weights(p, "with_payoff_weights");
    return out;
}

/// Loads rows "date weight" (whitespace- or comma-separated, '#' comments).
/// Weights are renormalized; the maturity is the last date.
inline MonitoringGrid grid_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("grid_from_file: cannot open " + path);
    std::vector<double> dates, weights;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (auto& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ss(line);
        double u = 0.0, w = 0.0;
        if (ss >> u >> w) {
            dates.push_back(u);
            weights.push_back(w);
        } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
            throw std::invalid_argument("grid_from_file: malformed line '" + line + "'");
        }
    }
    if (dates.empty()) throw std::invalid_argument("grid_from_file: no rows in " + path);
    return custom_grid(dates.back(), dates, weights);
}

}  // namespace asianbounds
