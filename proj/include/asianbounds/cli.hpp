#pragma once

// Command-line front end: flat key-value request files, CSV reports and the
// built-in benchmark tables. Numeric fields print with six significant digits
// so report output is byte-stable.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asianbounds/curves.hpp"
#include "asianbounds/gaussian_bounds.hpp"
#include "asianbounds/grids.hpp"
#include "asianbounds/mc_oracle.hpp"
#include "asianbounds/vwap.hpp"

namespace asianbounds::cli {

struct RunOptions {
    std::size_t hermite_nodes = 64;
    double opt_tol = 1e-8;
    unsigned workers = 0;
};

inline std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Parsed "key = value" request file. Getters throw std::invalid_argument
/// naming the offending key; every key must be consumed.
class RequestValues {
public:
    static RequestValues parse(std::istream& in) {
        RequestValues rv;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string body = detail::trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("request line " + std::to_string(line_no) +
                                            ": expected 'key = value'");
            const std::string key = detail::trim(body.substr(0, eq));
            const std::string value = detail::trim(body.substr(eq + 1));
            if (key.empty() || value.empty())
                throw std::invalid_argument("request line " + std::to_string(line_no) +
                                            ": empty key or value");
            if (!rv.kv_.emplace(key, value).second)
                throw std::invalid_argument(key + ": duplicate key");
        }
        return rv;
    }

    static RequestValues from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open request file " + path);
        return parse(in);
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string text(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw std::invalid_argument(key + ": missing required key");
        consumed_[key] = true;
        return it->second;
    }

    std::string text_or(const std::string& key, const std::string& fallback) {
        return has(key) ? text(key) : fallback;
    }

    double number(const std::string& key) {
        const std::string raw = text(key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument(key + ": not a number ('" + raw + "')");
        }
    }

    double number_or(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }

    std::uint64_t integer(const std::string& key) {
        const std::string raw = text(key);
        try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument(key + ": not a nonnegative integer ('" + raw + "')");
        }
    }

    std::uint64_t integer_or(const std::string& key, std::uint64_t fallback) {
        return has(key) ? integer(key) : fallback;
    }

    bool flag_or(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const std::string raw = text(key);
        if (raw == "true" || raw == "1" || raw == "yes") return true;
        if (raw == "false" || raw == "0" || raw == "no") return false;
        throw std::invalid_argument(key + ": expected true/false ('" + raw + "')");
    }

    /// Throws on any key that was never consumed by a getter.
    void reject_unknown() const {
        for (const auto& [key, value] : kv_)
            if (!consumed_.count(key)) throw std::invalid_argument(key + ": unknown key");
    }

private:
    std::map<std::string, std::string> kv_;
    std::map<std::string, bool> consumed_;
};

struct PriceRequest {
    double spot = 0.0;
    double strike = 0.0;
    double sigma = 0.0;
    bool vwap_payoff = false;
    RateCurve curve;
    MonitoringGrid grid;
    std::optional<VolumeModel> volume;
    bool g_from_file = false;
    std::string g_file;
    std::uint64_t g_paths = 1'000'000;
    std::uint64_t g_seed = 1;
    std::optional<McConfig> mc;
};

inline PriceRequest parse_request(std::istream& in) {
    RequestValues rv = RequestValues::parse(in);
    PriceRequest req;

    req.spot = rv.number("S0");
    if (!(req.spot > 0.0)) throw std::invalid_argument("S0: must be > 0");
    req.strike = rv.number("K");
    if (!(req.strike > 0.0)) throw std::invalid_argument("K: must be > 0");
    req.sigma = rv.number("sigma");
    if (!(req.sigma >= 0.0)) throw std::invalid_argument("sigma: must be >= 0");

    const std::string payoff = rv.text_or("payoff", "asian");
    if (payoff == "asian")
        req.vwap_payoff = false;
    else if (payoff == "vwap")
        req.vwap_payoff = true;
    else
        throw std::invalid_argument("payoff: expected asian or vwap ('" + payoff + "')");

    const std::string kind = rv.text_or("curve.kind", "constant");
    if (kind == "constant") {
        req.curve = RateCurve::constant(rv.number("curve.r0"));
    } else if (kind == "sinusoidal") {
        req.curve = RateCurve::sinusoidal(rv.number("curve.r0"), rv.number_or("curve.c", 0.0));
    } else if (kind == "tabulated") {
        req.curve = RateCurve::from_file(rv.text("curve.file"));
    } else {
        throw std::invalid_argument("curve.kind: expected constant, sinusoidal or tabulated ('" +
                                    kind + "')");
    }

    const int grid_specs = int(rv.has("grid.N")) + int(rv.has("grid.M")) + int(rv.has("grid.file"));
    if (grid_specs != 1)
        throw std::invalid_argument("grid: specify exactly one of grid.N, grid.M, grid.file");
    if (rv.has("grid.file")) {
        req.grid = grid_from_file(rv.text("grid.file"));
    } else {
        const double maturity = rv.number("grid.T");
        if (!(maturity > 0.0)) throw std::invalid_argument("grid.T: must be > 0");
        if (rv.has("grid.N"))
            req.grid = uniform_discrete(maturity, static_cast<std::size_t>(rv.integer("grid.N")));
        else
            req.grid = continuous_uniform_approx(maturity,
                                                 static_cast<std::size_t>(rv.integer("grid.M")));
    }

    if (req.vwap_payoff) {
        VolumeModel volume;
        volume.mean_reversion = rv.number("vwap.lambda");
        volume.long_run_level = rv.number("vwap.theta");
        volume.diffusion = rv.number("vwap.eta");
        volume.initial_level = rv.number("vwap.x0");
        try {
            validate(volume);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("vwap.lambda/eta: ") + e.what());
        }
        req.volume = volume;
        const std::string source = rv.text_or("vwap.g", "estimate");
        if (source == "estimate") {
            req.g_from_file = false;
            req.g_paths = rv.integer_or("vwap.g_paths", 1'000'000);
            req.g_seed = rv.integer_or("vwap.g_seed", 1);
        } else if (source == "file") {
            req.g_from_file = true;
            req.g_file = rv.text("vwap.g_file");
        } else {
            throw std::invalid_argument("vwap.g: expected estimate or file ('" + source + "')");
        }
    }

    if (rv.has("mc.paths")) {
        McConfig mc;
        mc.paths = rv.integer("mc.paths");
        mc.seed = rv.integer_or("mc.seed", 0);
        mc.antithetic = rv.flag_or("mc.antithetic", true);
        req.mc = mc;
    }

    rv.reject_unknown();
    return req;
}

inline PriceRequest load_request(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open request file " + path);
    return parse_request(in);
}

namespace detail {

inline BoundsConfig bounds_config(const RunOptions& opts) {
    BoundsConfig cfg;
    cfg.hermite_nodes = opts.hermite_nodes;
    cfg.opt_tol = opts.opt_tol;
    return cfg;
}

inline GEstimate request_g(const PriceRequest& req, const RunOptions& opts) {
    if (req.g_from_file) return load_g_estimate(req.g_file, req.grid);
    return estimate_g(*req.volume, req.grid, req.g_paths, req.g_seed, opts.workers);
}

inline std::string opt_field(const std::optional<double>& v) {
    return v ? fmt6(*v) : "nan";
}

}  // namespace detail

/// LB2, LB1, UB1, midpoint, worst-case error % and the optimizers, as one CSV record.
inline std::string run_bounds(const PriceRequest& req, const RunOptions& opts = {}) {
    const BoundsConfig cfg = detail::bounds_config(opts);
    MonitoringGrid grid = req.grid;
    if (req.vwap_payoff) grid = vwap_payoff_grid(req.grid, detail::request_g(req, opts));
    const GaussianAvgModel model = build_model(req.curve, req.sigma, grid);
    const double moneyness = req.strike / req.spot;
    const BoundResult lower2 = lb2(model, moneyness, req.spot, cfg);
    const BoundResult lower1 = lb1(model, moneyness, req.spot, cfg);
    const BoundResult upper1 = ub1(model, moneyness, req.spot, cfg);
    const auto [mid, err] = midpoint_and_error(lower1, upper1);
    std::string out = "LB2,LB1,UB1,midpoint,error_pct,z_star,a_star\n";
    out += fmt6(lower2.value) + ',' + fmt6(lower1.value) + ',' + fmt6(upper1.value) + ',' +
           fmt6(mid) + ',' + fmt6(err) + ',' + detail::opt_field(lower1.argopt) + ',' +
           detail::opt_field(upper1.argopt) + '\n';
    return out;
}

/// Monte Carlo reference price for the request's payoff.
inline std::string run_mc(const PriceRequest& req, const RunOptions& opts = {}) {
    if (!req.mc) throw std::invalid_argument("mc.paths: missing Monte Carlo settings");
    McConfig cfg = *req.mc;
    cfg.workers = opts.workers;
    const McEstimate est =
        req.vwap_payoff
            ? mc_vwap_price(req.curve, req.sigma, req.spot, req.strike, req.grid, *req.volume,
                            cfg)
            : mc_asian_price(req.curve, req.sigma, req.spot, req.strike, req.grid, cfg);
    std::string out = "mean,stderr,paths,seed\n";
    out += fmt6(est.mean) + ',' + fmt6(est.std_error) + ',' + std::to_string(est.paths) + ',' +
           std::to_string(est.seed) + '\n';
    return out;
}

/// Benchmark table 1: S0 = K = 100, sigma = 0.3, sinusoidal rate
/// 0.09 (1 + c/2 sin 2 pi s); T in {1, 9}, N in {10, 50, inf}, c in {0, 1}.
inline std::string table1_csv(const RunOptions& opts = {}) {
    const BoundsConfig cfg = detail::bounds_config(opts);
    std::string out = "T,N,c,LB1,UB1,error_pct\n";
    for (const double maturity : {1.0, 9.0}) {
        for (const long n : {10L, 50L, 0L}) {  // 0 marks the continuous row
            for (const double c : {0.0, 1.0}) {
                const RateCurve curve = RateCurve::sinusoidal(0.09, c);
                const MonitoringGrid grid =
                    n > 0 ? uniform_discrete(maturity, static_cast<std::size_t>(n))
                          : continuous_uniform_approx(maturity, 200);
                const GaussianAvgModel model = build_model(curve, 0.3, grid);
                const BoundResult lower = lb1(model, 1.0, 100.0, cfg);
                const BoundResult upper = ub1(model, 1.0, 100.0, cfg);
                const auto [mid, err] = midpoint_and_error(lower, upper);
                (void)mid;
                out += fmt6(maturity) + ',' + (n > 0 ? std::to_string(n) : std::string("inf")) +
                       ',' + fmt6(c) + ',' + fmt6(lower.value) + ',' + fmt6(upper.value) + ',' +
                       fmt6(err) + '\n';
            }
        }
    }
    return out;
}

/// Benchmark table 2: VWAP option, S0 = 110, K = 100, T = 1, r = 0.1,
/// continuously monitored through 500 quadrature dates, squared-OU volume
/// (lambda 2, theta 22, eta 5, Y0 22); sigma in {0.1, 0.5, 0.8}.
inline std::string table2_csv(std::uint64_t g_paths, std::uint64_t mc_paths, std::uint64_t seed,
                              const RunOptions& opts = {}) {
    const BoundsConfig cfg = detail::bounds_config(opts);
    const MonitoringGrid grid = continuous_uniform_approx(1.0, 500);
    const RateCurve curve = RateCurve::constant(0.1);
    const VolumeModel volume{2.0, 22.0, 5.0, 22.0};
    const GEstimate g = estimate_g(volume, grid, g_paths, seed, opts.workers);
    std::string out = "sigma,LB1,MC,MC_stderr,UB1\n";
    std::uint64_t mc_seed = seed;
    for (const double sigma : {0.1, 0.5, 0.8}) {
        const auto [lower, upper] = vwap_bounds(curve, sigma, 110.0, 100.0, grid, g, cfg);
        McConfig mc_cfg;
        mc_cfg.paths = mc_paths;
        mc_cfg.seed = ++mc_seed;
        mc_cfg.workers = opts.workers;
        const McEstimate est = mc_vwap_price(curve, sigma, 110.0, 100.0, grid, volume, mc_cfg);
        out += fmt6(sigma) + ',' + fmt6(lower.value) + ',' + fmt6(est.mean) + ',' +
               fmt6(est.std_error) + ',' + fmt6(upper.value) + '\n';
    }
    return out;
}

}  // namespace asianbounds::cli
