#pragma once

// Squared Ornstein-Uhlenbeck traded-volume model: U_t = Y_t^2 with
// dY = lambda (theta - Y) dt + eta dB. Exact transition constants are
// precomputed per grid so paths carry no discretization error.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "asianbounds/grids.hpp"

namespace asianbounds {

struct VolumeModel {
    double mean_reversion = 2.0;   ///< lambda per year, > 0
    double long_run_level = 22.0;  ///< theta
    double diffusion = 5.0;        ///< eta, >= 0
    double initial_level = 22.0;   ///< Y_0
};

inline void validate(const VolumeModel& model) {
    if (!(model.mean_reversion > 0.0))
        throw std::invalid_argument("VolumeModel: mean reversion must be > 0");
    if (!(model.diffusion >= 0.0))
        throw std::invalid_argument("VolumeModel: diffusion must be >= 0");
    if (!std::isfinite(model.long_run_level) || !std::isfinite(model.initial_level))
        throw std::invalid_argument("VolumeModel: non-finite level");
}

namespace detail {

/// Exact OU step constants between consecutive grid dates (from time zero).
struct OuTransition {
    std::vector<double> decay;  ///< e^{-lambda dt_j}
    std::vector<double> shock;  ///< eta sqrt((1 - e^{-2 lambda dt_j}) / (2 lambda))

    static OuTransition build(const VolumeModel& model, const MonitoringGrid& grid) {
        OuTransition tr;
        const std::size_t n = grid.size();
        tr.decay.resize(n);
        tr.shock.resize(n);
        double prev = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double dt = grid.dates[j] - prev;
            prev = grid.dates[j];
            const double e = std::exp(-model.mean_reversion * dt);
            tr.decay[j] = e;
            tr.shock[j] = model.diffusion *
                          std::sqrt((1.0 - e * e) / (2.0 * model.mean_reversion));
        }
        return tr;
    }
};

}  // namespace detail
}  // namespace asianbounds
