#pragma once

// Joint Gaussian model of the log prices and their weighted average, plus the
// closed-form bound engines: the indicator lower bound (lb1), the Jensen upper
// bound over affine tilts (ub1) and the conditioning lower bound (lb2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "asianbounds/curves.hpp"
#include "asianbounds/grids.hpp"
#include "asianbounds/numerics.hpp"

namespace asianbounds {

/// Per-date means and Brownian covariances of (X_{u_i}, average of X).
/// X_u = R_u + sigma W_u - sigma^2 u / 2, so discounted prices are martingales.
struct GaussianAvgModel {
    MonitoringGrid grid;
    double sigma = 0.0;
    std::vector<double> r_int;     ///< R_{u_i}
    double r_maturity = 0.0;       ///< R_T
    std::vector<double> log_mean;  ///< m_i = R_{u_i} - sigma^2 u_i / 2
    std::vector<double> kappa;     ///< Cov(W_{u_i}, weighted average of W)
    double avg_var = 0.0;          ///< Var of the weighted average of W
    double mean_avg = 0.0;         ///< weighted average of the m_i
};

struct BoundResult {
    double value = 0.0;
    std::optional<double> argopt;  ///< z* for lb1, a* for ub1, absent for lb2
    int evaluations = 0;
};

struct BoundsConfig {
    std::size_t hermite_nodes = 64;
    double opt_tol = 1e-8;
    double a_lo = 0.0;  ///< bracket for the ub1 tilt coefficient
    double a_hi = 1.5;
};

/// Cov(W_u, W-bar) under the grid's indicator weights. Discrete grids sum
/// w_j min(u, u_j); continuous grids use the exact uniform limit u - u^2/(2T).
inline double kappa_of(const MonitoringGrid& grid, double u) {
    if (!(u > 0.0) || u > grid.maturity * (1.0 + 1e-12))
        throw std::invalid_argument("kappa_of: date outside (0, T]");
    if (grid.mode == GridMode::continuous_approx)
        return u * (1.0 - u / (2.0 * grid.maturity));
    long double acc = 0.0L;
    for (std::size_t j = 0; j < grid.size(); ++j)
        acc += static_cast<long double>(grid.indicator_weights[j]) * std::min(u, grid.dates[j]);
    return static_cast<double>(acc);
}

/// Var(W-bar) under the indicator weights; T/3 exactly in continuous mode.
/// The double sum collapses to one pass because the dates are sorted.
inline double avg_variance(const MonitoringGrid& grid) {
    if (grid.mode == GridMode::continuous_approx) return grid.maturity / 3.0;
    long double prefix_wu = 0.0L, prefix_w = 0.0L, acc = 0.0L;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const long double w = grid.indicator_weights[i];
        const long double u = grid.dates[i];
        prefix_wu += w * u;
        prefix_w += w;
        acc += w * (prefix_wu + u * (1.0L - prefix_w));
    }
    return static_cast<double>(acc);
}

inline GaussianAvgModel build_model(const RateCurve& curve, double sigma,
                                    const MonitoringGrid& grid) {
    if (sigma < 0.0) throw std::invalid_argument("build_model: sigma must be >= 0");
    GaussianAvgModel model;
    model.grid = grid;
    model.sigma = sigma;
    const std::size_t n = grid.size();
    model.r_int.resize(n);
    model.log_mean.resize(n);
    model.kappa.resize(n);
    long double mbar = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = grid.dates[i];
        model.r_int[i] = integrated_rate(curve, u);
        model.log_mean[i] = model.r_int[i] - 0.5 * sigma * sigma * u;
        model.kappa[i] = kappa_of(grid, u);
        mbar += static_cast<long double>(grid.indicator_weights[i]) * model.log_mean[i];
    }
    model.r_maturity = integrated_rate(curve, grid.maturity);
    model.avg_var = avg_variance(grid);
    model.mean_avg = static_cast<double>(mbar);
    return model;
}

namespace detail {

/// Discounted closed form of E[(sum_i p_i e^{X_i} - c) 1{X-bar > z}] * S0,
/// from the Gaussian identity E[e^G 1{H > z}] = E[e^G] Phi((mu_H + Cov(G,H) - z)/sd_H).
struct IndicatorObjective {
    std::vector<double> disc_payoff;  ///< p_i e^{R_{u_i}} e^{-R_T} S0
    std::vector<double> shift;        ///< mean_avg + sigma^2 kappa_i
    double mean_avg;
    double sd_avg;       ///< sigma sqrt(V)
    double strike_term;  ///< c e^{-R_T} S0

    IndicatorObjective(const GaussianAvgModel& m, double c, double s0) {
        const std::size_t n = m.grid.size();
        const double disc = std::exp(-m.r_maturity) * s0;
        disc_payoff.resize(n);
        shift.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            disc_payoff[i] = m.grid.payoff_weights[i] * std::exp(m.r_int[i]) * disc;
            shift[i] = m.mean_avg + m.sigma * m.sigma * m.kappa[i];
        }
        mean_avg = m.mean_avg;
        sd_avg = m.sigma * std::sqrt(m.avg_var);
        strike_term = c * disc;
    }

    double operator()(double z) const {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < disc_payoff.size(); ++i)
            acc += static_cast<long double>(disc_payoff[i]) *
                   norm_cdf((shift[i] - z) / sd_avg);
        return static_cast<double>(acc) - strike_term * norm_cdf((mean_avg - z) / sd_avg);
    }

    /// Value with the indicator removed, i.e. z -> -infinity.
    double full_mean() const {
        long double acc = 0.0L;
        for (double v : disc_payoff) acc += v;
        return static_cast<double>(acc) - strike_term;
    }
};

enum class RootKind { interior, below_range, above_range };

struct ConditionalRoot {
    RootKind kind;
    double y = 0.0;
    int evaluations = 0;
};

/// Root of g(y) = c where g(y) = sum_i p_i E(e^{X_i} | X-bar = y); g is strictly
/// increasing because every kappa_i > 0. The root is also the maximizer of the
/// indicator objective (first-order condition E[payoff | X-bar = z] = 0).
inline ConditionalRoot conditional_mean_root(const GaussianAvgModel& m, double c) {
    const std::size_t n = m.grid.size();
    const double sig2 = m.sigma * m.sigma;
    std::vector<double> beta(n), base(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = m.grid.dates[i];
        const double residual = u - m.kappa[i] * m.kappa[i] / m.avg_var;
        if (residual < -1e-12)
            throw std::runtime_error("conditional_mean_root: negative conditional variance");
        beta[i] = m.kappa[i] / m.avg_var;
        base[i] = m.log_mean[i] + 0.5 * sig2 * std::max(residual, 0.0);
    }
    int evals = 0;
    auto g = [&](double y) {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < n; ++i)
            acc += static_cast<long double>(m.grid.payoff_weights[i]) *
                   std::exp(base[i] + beta[i] * (y - m.mean_avg));
        ++evals;
        return static_cast<double>(acc);
    };
    const double sv = m.sigma * std::sqrt(m.avg_var);
    double lo = m.mean_avg - 6.0 * sv, hi = m.mean_avg + 6.0 * sv;
    double step = sv;
    while (g(lo) > c && lo > m.mean_avg - 60.0 * sv) {
        lo -= step;
        step *= 2.0;
    }
    step = sv;
    while (g(hi) < c && hi < m.mean_avg + 60.0 * sv) {
        hi += step;
        step *= 2.0;
    }
    if (g(lo) > c) return {RootKind::below_range, lo, evals};
    if (g(hi) < c) return {RootKind::above_range, hi, evals};
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (sv + std::abs(m.mean_avg)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < c)
            lo = mid;
        else
            hi = mid;
    }
    return {RootKind::interior, 0.5 * (lo + hi), evals};
}

/// E[(e^X - alpha - gamma X)^+] for X ~ N(m, s^2), exact. Used by ub1 for
/// dates whose conditional variance degenerates to zero (the inner positive
/// part then stays kinked and Hermite quadrature would lose its accuracy).
inline double exp_linear_positive_mean(double alpha, double gamma, double m, double s) {
    if (s == 0.0) return std::max(std::exp(m) - alpha - gamma * m, 0.0);
    const double expect = std::exp(m + 0.5 * s * s);
    auto tail = [&](double x0) {
        // E[(e^X - alpha - gamma X) 1{X > x0}]
        const double d = (m - x0) / s;
        return expect * norm_cdf(d + s) - alpha * norm_cdf(d) -
               gamma * (m * norm_cdf(d) + s * norm_pdf(d));
    };
    const double full = expect - alpha - gamma * m;
    auto bisect = [](auto&& f, double a, double b, bool rising) {
        for (int it = 0; it < 160; ++it) {
            const double mid = 0.5 * (a + b);
            const bool below = f(mid) < 0.0;
            if (below == rising)
                a = mid;
            else
                b = mid;
        }
        return 0.5 * (a + b);
    };
    auto q = [&](double x) { return std::exp(x) - alpha - gamma * x; };
    if (gamma > 0.0) {
        const double x_min = std::log(gamma);
        if (q(x_min) >= 0.0) return full;  // positive everywhere
        double left = x_min, step = 1.0 + s;
        while (q(left) < 0.0) {
            left -= step;
            step *= 2.0;
        }
        double right = x_min;
        step = 1.0 + s;
        while (q(right) < 0.0) {
            right += step;
            step *= 2.0;
        }
        const double x1 = bisect(q, left, x_min, false);
        const double x2 = bisect(q, x_min, right, true);
        return (full - tail(x1)) + tail(x2);
    }
    if (gamma == 0.0) {
        if (alpha <= 0.0) return full;
        return tail(std::log(alpha));
    }
    // gamma < 0: q strictly increasing with a single root.
    double left = m, step = 1.0 + s;
    while (q(left) > 0.0) {
        left -= step;
        step *= 2.0;
    }
    double right = left;
    step = 1.0 + s;
    while (q(right) < 0.0) {
        right += step;
        step *= 2.0;
    }
    return tail(bisect(q, left, right, true));
}

}  // namespace detail

/// Indicator lower bound: S0 sup_z E[e^{-R_T} (sum p_i e^{X_i} - c) 1{X-bar > z}].
/// The golden-section bracket is mean_avg +/- 6 sigma sqrt(V), widened when the
/// first-order-condition root falls outside it (deep in/out of the money).
inline BoundResult lb1(const GaussianAvgModel& model, double moneyness, double spot,
                       const BoundsConfig& cfg = {}) {
    if (!(moneyness > 0.0)) throw std::invalid_argument("lb1: moneyness must be > 0");
    if (!(spot > 0.0)) throw std::invalid_argument("lb1: spot must be > 0");
    const detail::IndicatorObjective objective(model, moneyness, spot);
    if (objective.sd_avg == 0.0)
        return {std::max(objective.full_mean(), 0.0), std::nullopt, 0};
    const auto root = detail::conditional_mean_root(model, moneyness);
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (root.kind == detail::RootKind::below_range)
        return {std::max(objective.full_mean(), 0.0), -inf, root.evaluations};
    if (root.kind == detail::RootKind::above_range)
        return {0.0, inf, root.evaluations};
    const double sv = objective.sd_avg;
    const double lo = std::min(model.mean_avg - 6.0 * sv, root.y - sv);
    const double hi = std::max(model.mean_avg + 6.0 * sv, root.y + sv);
    const OptResult opt = maximize_scalar(objective, lo, hi, cfg.opt_tol);
    return {std::max(opt.value, 0.0), opt.argopt, opt.evaluations};
}

/// Jensen upper bound over the affine tilt family h = a X:
/// S0 inf_a E[e^{-R_T} avg_p (e^{X_i} - c (1 + a X_i - a X-bar))^+].
/// Each date conditions on X_i, leaving a Gaussian positive-part mean inside a
/// Hermite integral; dates with degenerate conditional variance are integrated
/// exactly to keep the kink out of the quadrature.
inline BoundResult ub1(const GaussianAvgModel& model, double moneyness, double spot,
                       const BoundsConfig& cfg = {}) {
    if (!(moneyness > 0.0)) throw std::invalid_argument("ub1: moneyness must be > 0");
    if (!(spot > 0.0)) throw std::invalid_argument("ub1: spot must be > 0");
    const std::size_t n = model.grid.size();
    const std::size_t nodes = cfg.hermite_nodes;
    const QuadratureRule& gh = gauss_hermite_rule(nodes);
    const double sig = model.sigma;
    const double disc = std::exp(-model.r_maturity) * spot;
    const double c = moneyness;

    std::vector<double> cond_sd(n), slope(n), date_sd(n);
    std::vector<char> degenerate(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = model.grid.dates[i];
        const double residual = model.avg_var - model.kappa[i] * model.kappa[i] / u;
        if (residual < -1e-12)
            throw std::runtime_error("ub1: negative conditional variance at date " +
                                     std::to_string(u));
        const double var = sig * sig * std::max(residual, 0.0);
        cond_sd[i] = std::sqrt(var);
        slope[i] = model.kappa[i] / u;
        date_sd[i] = sig * std::sqrt(u);
        degenerate[i] = var <= 1e-14 * sig * sig * model.avg_var ? 1 : 0;
    }

    // Evaluation grid reused across tilt values: x_ik, e^{x_ik} and the
    // conditional mean of X-bar given X_i = x_ik.
    std::vector<double> xs(n * nodes), es(n * nodes), cm(n * nodes);
    for (std::size_t i = 0; i < n; ++i) {
        if (degenerate[i]) continue;
        for (std::size_t k = 0; k < nodes; ++k) {
            const double x = model.log_mean[i] + date_sd[i] * gh.nodes[k];
            xs[i * nodes + k] = x;
            es[i * nodes + k] = std::exp(x);
            cm[i * nodes + k] = model.mean_avg + slope[i] * (x - model.log_mean[i]);
        }
    }

    auto objective = [&](double a) {
        long double acc = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            double term;
            // The Hermite route needs the inner positive part smoothed by a
            // nonvanishing conditional spread |a| cond_sd; below that (a ~ 0
            // or a degenerate date) the kinked integral is done exactly.
            if (!degenerate[i] && std::abs(a) * cond_sd[i] > 1e-8 * date_sd[i]) {
                const double sd = std::abs(c * a) * cond_sd[i];
                long double inner = 0.0L;
                for (std::size_t k = 0; k < nodes; ++k) {
                    const std::size_t ik = i * nodes + k;
                    const double mean = es[ik] - c * (1.0 + a * xs[ik]) + c * a * cm[ik];
                    double v;
                    if (sd == 0.0) {
                        v = std::max(mean, 0.0);
                    } else {
                        const double d = mean / sd;
                        v = mean * norm_cdf(d) + sd * norm_pdf(d);
                    }
                    inner += static_cast<long double>(gh.weights[k] * v);
                }
                term = static_cast<double>(inner);
            } else {
                const double gamma = c * a * (1.0 - slope[i]);
                const double alpha = c * (1.0 - a * model.mean_avg + a * slope[i] * model.log_mean[i]);
                term = detail::exp_linear_positive_mean(alpha, gamma, model.log_mean[i],
                                                        date_sd[i]);
            }
            acc += static_cast<long double>(model.grid.payoff_weights[i]) * term;
        }
        return disc * static_cast<double>(acc);
    };
    const OptResult opt = minimize_scalar(objective, cfg.a_lo, cfg.a_hi, cfg.opt_tol);
    return {opt.value, opt.argopt, opt.evaluations};
}

/// Conditioning lower bound: S0 E[e^{-R_T} (sum p_i E(e^{X_i} | X-bar) - c)^+].
/// The conditional mean is increasing in X-bar, so the positive part activates
/// exactly beyond the root y* of g(y) = c; the smooth branch then integrates in
/// closed form, which coincides with the indicator objective at z = y*.
inline BoundResult lb2(const GaussianAvgModel& model, double moneyness, double spot,
                       const BoundsConfig& cfg = {}) {
    (void)cfg;
    if (!(moneyness > 0.0)) throw std::invalid_argument("lb2: moneyness must be > 0");
    if (!(spot > 0.0)) throw std::invalid_argument("lb2: spot must be > 0");
    const detail::IndicatorObjective objective(model, moneyness, spot);
    if (objective.sd_avg == 0.0)
        return {std::max(objective.full_mean(), 0.0), std::nullopt, 0};
    const auto root = detail::conditional_mean_root(model, moneyness);
    if (root.kind == detail::RootKind::below_range)
        return {std::max(objective.full_mean(), 0.0), std::nullopt, root.evaluations};
    if (root.kind == detail::RootKind::above_range)
        return {0.0, std::nullopt, root.evaluations};
    return {std::max(objective(root.y), 0.0), std::nullopt, root.evaluations};
}

/// Midpoint estimate and its worst-case relative error in percent,
/// ((ub/lb) - 1) * 50.
inline std::pair<double, double> midpoint_and_error(const BoundResult& lb,
                                                    const BoundResult& ub) {
    if (!(lb.value > 0.0))
        throw std::invalid_argument("midpoint_and_error: lower bound must be positive");
    if (ub.value < lb.value - 1e-12)
        throw std::invalid_argument("midpoint_and_error: bounds out of order");
    return {0.5 * (lb.value + ub.value), (ub.value / lb.value - 1.0) * 50.0};
}

}  // namespace asianbounds
