#pragma once

// Deterministic interest-rate term structures: the short rate r_s, its
// running integral R_t and discount factors e^{-R_t}.

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asianbounds/numerics.hpp"

namespace asianbounds {

enum class CurveKind { constant, sinusoidal, tabulated };

/// Immutable rate curve. The sinusoidal kind is r_s = r0 (1 + c/2 sin(2 pi s));
/// the tabulated kind interpolates the rate linearly between knots and
/// extrapolates flat on both sides.
struct RateCurve {
    CurveKind kind = CurveKind::constant;
    double r0 = 0.0;                ///< base rate per year
    double c = 0.0;                 ///< sinusoidal amplitude parameter
    std::vector<double> times;      ///< tabulated knots, strictly increasing, >= 0
    std::vector<double> rates;      ///< annualized rates at the knots
    std::vector<double> knot_integrals;  ///< integral of the rate up to each knot

    static RateCurve constant(double rate) {
        RateCurve curve;
        curve.kind = CurveKind::constant;
        curve.r0 = rate;
        return curve;
    }

    static RateCurve sinusoidal(double rate, double amplitude) {
        RateCurve curve;
        curve.kind = CurveKind::sinusoidal;
        curve.r0 = rate;
        curve.c = amplitude;
        return curve;
    }

    static RateCurve tabulated(std::vector<double> times, std::vector<double> rates) {
        if (times.empty() || times.size() != rates.size())
            throw std::invalid_argument("RateCurve::tabulated: need matching non-empty knots");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!std::isfinite(times[i]) || !std::isfinite(rates[i]))
                throw std::invalid_argument("RateCurve::tabulated: non-finite knot");
            if (times[i] < 0.0)
                throw std::invalid_argument("RateCurve::tabulated: negative knot time");
            if (i > 0 && times[i] <= times[i - 1])
                throw std::invalid_argument("RateCurve::tabulated: times must be strictly increasing");
        }
        RateCurve curve;
        curve.kind = CurveKind::tabulated;
        curve.times = std::move(times);
        curve.rates = std::move(rates);
        curve.knot_integrals.resize(curve.times.size());
        // Flat rate before the first knot, trapezoids between knots.
        long double acc = static_cast<long double>(curve.rates.front()) * curve.times.front();
        curve.knot_integrals[0] = static_cast<double>(acc);
        for (std::size_t i = 1; i < curve.times.size(); ++i) {
            acc += 0.5L * (static_cast<long double>(curve.rates[i - 1]) + curve.rates[i]) *
                   (curve.times[i] - curve.times[i - 1]);
            curve.knot_integrals[i] = static_cast<double>(acc);
        }
        return curve;
    }

    /// Two-column text file (time, annualized rate), whitespace- or
    /// comma-separated; '#' starts a comment.
    static RateCurve from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("RateCurve::from_file: cannot open " + path);
        std::vector<double> ts, rs;
        std::string line;
        while (std::getline(in, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            for (auto& ch : line)
                if (ch == ',') ch = ' ';
            std::istringstream ss(line);
            double t = 0.0, r = 0.0;
            if (ss >> t >> r) {
                ts.push_back(t);
                rs.push_back(r);
            } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
                throw std::invalid_argument("RateCurve::from_file: malformed line '" + line + "'");
            }
        }
        return tabulated(std::move(ts), std::move(rs));
    }
};

/// Instantaneous rate r_t.
inline double rate_at(const RateCurve& curve, double t) {
    if (t < 0.0) throw std::invalid_argument("rate_at: negative time");
    switch (curve.kind) {
        case CurveKind::constant:
            return curve.r0;
        case CurveKind::sinusoidal:
            return curve.r0 * (1.0 + 0.5 * curve.c * std::sin(2.0 * kPi * t));
        case CurveKind::tabulated: {
            const auto& ts = curve.times;
            if (t <= ts.front()) return curve.rates.front();
            if (t >= ts.back()) return curve.rates.back();
            std::size_t hi = 1;
            while (ts[hi] < t) ++hi;
            const double w = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
            return curve.rates[hi - 1] + w * (curve.rates[hi] - curve.rates[hi - 1]);
        }
    }
    throw std::logic_error("rate_at: bad curve kind");
}

/// R_t, the integral of the rate over [0, t]. Exact antiderivative for the
/// constant and sinusoidal kinds, exact piecewise-linear integration for
/// tabulated curves.
inline double integrated_rate(const RateCurve& curve, double t) {
    if (t < 0.0) throw std::invalid_argument("integrated_rate: negative time");
    switch (curve.kind) {
        case CurveKind::constant:
            return curve.r0 * t;
        case CurveKind::sinusoidal:
            return curve.r0 * t +
                   curve.r0 * 0.5 * curve.c * (1.0 - std::cos(2.0 * kPi * t)) / (2.0 * kPi);
        case CurveKind::tabulated: {
            const auto& ts = curve.times;
            if (t <= ts.front()) return curve.rates.front() * t;
            if (t >= ts.back())
                return curve.knot_integrals.back() + curve.rates.back() * (t - ts.back());
            std::size_t hi = 1;
            while (ts[hi] < t) ++hi;
            const double dt = t - ts[hi - 1];
            const double r_t = rate_at(curve, t);
            return curve.knot_integrals[hi - 1] + 0.5 * (curve.rates[hi - 1] + r_t) * dt;
        }
    }
    throw std::logic_error("integrated_rate: bad curve kind");
}

/// e^{-R_t}; lies in (0, 1] whenever the rate is nonnegative.
inline double discount_factor(const RateCurve& curve, double t) {
    return std::exp(-integrated_rate(curve, t));
}

}  // namespace asianbounds
