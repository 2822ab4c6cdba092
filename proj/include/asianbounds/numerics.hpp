#pragma once

// Special functions, Gaussian quadrature and derivative-free scalar
// optimization shared by the bound engines.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace asianbounds {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF, evaluated through erfc so the tails saturate cleanly.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// E[(b + beta Z)^+] for Z ~ N(m, s^2), in closed form.
inline double positive_part_gaussian_mean(double b, double beta, double m, double s) {
    if (s < 0.0) throw std::invalid_argument("positive_part_gaussian_mean: s must be >= 0");
    const double sd = std::abs(beta) * s;
    const double mean = b + beta * m;
    if (sd == 0.0) return std::max(mean, 0.0);
    const double d = mean / sd;
    return mean * norm_cdf(d) + sd * norm_pdf(d);
}

/// exp(x) with Cody-Waite argument reduction and the Cephes rational kernel.
/// Within a few ulp of std::exp; used in the Monte Carlo path loops where the
/// library call dominates the cost.
inline double fast_exp(double x) {
    if (!(x > -700.0 && x < 700.0)) return std::exp(x);
    constexpr double log2e = 1.4426950408889634074;
    constexpr double c1 = 6.93145751953125e-1;
    constexpr double c2 = 1.42860682030941723212e-6;
    const double pd = std::floor(log2e * x + 0.5);
    const auto n = static_cast<std::int64_t>(pd);
    double r = x - pd * c1;
    r -= pd * c2;
    const double rr = r * r;
    double p = r * (((1.26177193074810590878e-4 * rr + 3.02994407707441961300e-2) * rr +
                     9.99999999999999999910e-1));
    const double q = ((3.00198505138664455042e-6 * rr + 2.52448340349684104192e-3) * rr +
                      2.27265548208155028766e-1) *
                         rr +
                     2.0;
    p = p / (q - p);
    const double y = 1.0 + 2.0 * p;
    const double scale = std::bit_cast<double>(static_cast<std::uint64_t>(1023 + n) << 52);
    return y * scale;
}

struct OptResult {
    double argopt = 0.0;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Golden-section minimum of f over [lo, hi]; tol is on the argument.
/// Convergence to the global minimum assumes f unimodal on the bracket.
template <class F>
OptResult minimize_scalar(F&& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("minimize_scalar: need lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("minimize_scalar: need tol > 0");
    constexpr double inv_phi = 0.61803398874989484820;
    int evals = 0;
    auto eval = [&](double x) {
        const double v = f(x);
        ++evals;
        if (!std::isfinite(v))
            throw std::runtime_error("minimize_scalar: non-finite objective at x = " +
                                     std::to_string(x));
        return v;
    };
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    constexpr int max_iter = 400;
    int iter = 0;
    while (b - a > tol && iter < max_iter) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        }
        ++iter;
    }
    OptResult res;
    res.argopt = 0.5 * (a + b);
    res.value = eval(res.argopt);
    res.evaluations = evals;
    res.converged = (b - a) <= tol;
    return res;
}

/// Golden-section maximum; same contract as minimize_scalar with the sign flipped.
template <class F>
OptResult maximize_scalar(F&& f, double lo, double hi, double tol) {
    OptResult res = minimize_scalar([&](double x) { return -f(x); }, lo, hi, tol);
    res.value = -res.value;
    return res;
}

enum class QuadKind { gauss_hermite, gauss_legendre };

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    QuadKind kind;
};

/// Gauss-Legendre rule on [-1, 1] (Newton iteration on the recurrence).
inline QuadratureRule make_gauss_legendre(std::size_t n) {
    if (n < 1) throw std::invalid_argument("make_gauss_legendre: need n >= 1");
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n), QuadKind::gauss_legendre};
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double deriv = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            deriv = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / deriv;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * deriv * deriv);
    }
    return rule;
}

/// Probabilists' Gauss-Hermite rule: integrates f against the standard normal
/// density, so sum_k w_k f(m + s x_k) approximates E f(N(m, s^2)).
inline QuadratureRule make_gauss_hermite(std::size_t n) {
    if (n < 1) throw std::invalid_argument("make_gauss_hermite: need n >= 1");
    // Physicists' nodes for weight e^{-x^2} first, largest root downwards.
    const double pim4 = 0.75112554446494248286;  // pi^{-1/4}
    const std::size_t half = (n + 1) / 2;
    std::vector<double> z_phys(half), w_phys(half);
    double z = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * z_phys[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * z_phys[1];
        } else {
            z = 2.0 * z - z_phys[i - 2];
        }
        double pp = 0.0;
        for (int it = 0; it < 200; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        z_phys[i] = z;
        w_phys[i] = 2.0 / (pp * pp);
    }
    QuadratureRule rule{std::vector<double>(n), std::vector<double>(n), QuadKind::gauss_hermite};
    const double inv_sqrt_pi = 0.56418958354775628695;
    for (std::size_t i = 0; i < half; ++i) {
        rule.nodes[n - 1 - i] = kSqrt2 * z_phys[i];
        rule.nodes[i] = -kSqrt2 * z_phys[i];
        rule.weights[i] = rule.weights[n - 1 - i] = w_phys[i] * inv_sqrt_pi;
    }
    if (n % 2 == 1) rule.nodes[half - 1] = 0.0;
    return rule;
}

namespace detail {

inline const QuadratureRule& cached_rule(std::size_t n, QuadKind kind) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, int>, QuadratureRule> cache;
    const std::pair<std::size_t, int> key{n, static_cast<int>(kind)};
    std::scoped_lock lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache
                 .emplace(key, kind == QuadKind::gauss_hermite ? make_gauss_hermite(n)
                                                               : make_gauss_legendre(n))
                 .first;
    }
    return it->second;
}

}  // namespace detail

/// Shared, lazily built probabilists' Hermite rule.
inline const QuadratureRule& gauss_hermite_rule(std::size_t n) {
    return detail::cached_rule(n, QuadKind::gauss_hermite);
}

/// Shared, lazily built Legendre rule on [-1, 1].
inline const QuadratureRule& gauss_legendre_rule(std::size_t n) {
    return detail::cached_rule(n, QuadKind::gauss_legendre);
}

/// E[g(Z)] for Z ~ N(m, s^2) by the n-node probabilists' Hermite rule;
/// exact for polynomial g of degree <= 2n-1.
template <class F>
double gauss_hermite_expectation(F&& g, double m, double s, std::size_t n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite_expectation: need n >= 1");
    if (s < 0.0) throw std::invalid_argument("gauss_hermite_expectation: need s >= 0");
    const QuadratureRule& rule = gauss_hermite_rule(n);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = m + s * rule.nodes[k];
        const double v = g(x);
        if (!std::isfinite(v))
            throw std::runtime_error("gauss_hermite_expectation: non-finite integrand at x = " +
                                     std::to_string(x));
        acc += static_cast<long double>(rule.weights[k] * v);
    }
    return static_cast<double>(acc);
}

}  // namespace asianbounds
