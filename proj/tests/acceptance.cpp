// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Heavier Monte Carlo settings live here rather than in the
// unit tests; everything is seeded and deterministic.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asianbounds/asianbounds.hpp"
#include "oracles.hpp"

using namespace asianbounds;

namespace {

struct Outcome {
    std::string name;
    bool pass = true;
    std::string detail;
    double seconds = 0.0;
};

struct Table1Cell {
    double maturity;
    long n;  // 0 = continuous
    double c;
    double lb1_ref, ub1_ref, err_ref;
};

// Published reference values for the benchmark table 1 (three printed digits).
const std::array<Table1Cell, 12> kTable1 = {{
    {1.0, 10, 0.0, 12.162, 12.259, 0.40},
    {1.0, 10, 1.0, 12.135, 12.239, 0.42},
    {1.0, 50, 0.0, 11.782, 11.829, 0.10},
    {1.0, 50, 1.0, 11.785, 11.807, 0.11},
    {1.0, 0, 0.0, 11.718, 11.731, 0.03},
    {1.0, 0, 1.0, 11.741, 11.769, 0.11},
    {9.0, 10, 0.0, 56.344, 57.233, 0.78},
    {9.0, 10, 1.0, 60.769, 61.568, 0.68},
    {9.0, 50, 0.0, 56.073, 56.419, 0.30},
    {9.0, 50, 1.0, 60.066, 60.506, 0.37},
    {9.0, 0, 0.0, 56.012, 56.146, 0.17},
    {9.0, 0, 1.0, 60.014, 60.197, 0.15},
}};

const VolumeModel kVolume{2.0, 22.0, 5.0, 22.0};

struct BoundsTriple {
    double lb1, ub1, err;
};

BoundsTriple table1_cell(const Table1Cell& cell, const BoundsConfig& cfg) {
    const RateCurve curve = RateCurve::sinusoidal(0.09, cell.c);
    const MonitoringGrid grid =
        cell.n > 0 ? uniform_discrete(cell.maturity, static_cast<std::size_t>(cell.n))
                   : continuous_uniform_approx(cell.maturity, 200);
    const GaussianAvgModel model = build_model(curve, 0.3, grid);
    const BoundResult lo = lb1(model, 1.0, 100.0, cfg);
    const BoundResult hi = ub1(model, 1.0, 100.0, cfg);
    return {lo.value, hi.value, (hi.value / lo.value - 1.0) * 50.0};
}

struct ParamSet {
    RateCurve curve;
    double sigma, maturity, moneyness;
    std::size_t n;
};

ParamSet draw_params(std::mt19937& gen) {
    std::uniform_real_distribution<double> sig(0.05, 0.8), mat(0.25, 10.0), mon(0.5, 2.0);
    std::uniform_real_distribution<double> rate(0.0, 0.12), amp(0.0, 1.5), pick(0.0, 1.0);
    std::uniform_int_distribution<int> nd(1, 64);
    ParamSet p;
    const double r0 = rate(gen);
    p.curve = pick(gen) < 0.5 ? RateCurve::constant(r0) : RateCurve::sinusoidal(r0, amp(gen));
    p.sigma = sig(gen);
    p.maturity = mat(gen);
    p.moneyness = mon(gen);
    p.n = static_cast<std::size_t>(nd(gen));
    return p;
}

double full_mean_value(const GaussianAvgModel& m, double c, double s0) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < m.grid.size(); ++i)
        acc += static_cast<long double>(m.grid.payoff_weights[i]) * std::exp(m.r_int[i]);
    return std::exp(-m.r_maturity) * s0 * (static_cast<double>(acc) - c);
}

std::string run_cli_capture(const std::string& args) {
    const std::string cmd = std::string(ASIANBOUNDS_CLI_BIN) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return "<popen failed>";
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    pclose(pipe);
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome criterion_table1() {
    Outcome out{"table1 reference values (LB1 +-0.003, UB1 +-0.010, err +-0.05, < 5 s)"};
    const auto t0 = std::chrono::steady_clock::now();
    double worst_lb = 0.0, worst_ub = 0.0, worst_err = 0.0;
    int bad = 0;
    for (const auto& cell : kTable1) {
        const BoundsTriple got = table1_cell(cell, BoundsConfig{});
        const double d_lb = std::abs(got.lb1 - cell.lb1_ref);
        const double d_ub = std::abs(got.ub1 - cell.ub1_ref);
        const double d_err = std::abs(got.err - cell.err_ref);
        worst_lb = std::max(worst_lb, d_lb);
        worst_ub = std::max(worst_ub, d_ub);
        worst_err = std::max(worst_err, d_err);
        if (d_lb > 0.003 || d_ub > 0.010 || d_err > 0.05) ++bad;
    }
    out.seconds = seconds_since(t0);
    out.pass = bad == 0 && out.seconds < 5.0;
    out.detail = std::to_string(bad) + "/12 cells out of tolerance; max |dLB1| = " +
                 fmt(worst_lb) + ", max |dUB1| = " + fmt(worst_ub) + ", max |derr| = " +
                 fmt(worst_err);
    return out;
}

Outcome criterion_table2() {
    Outcome out{"table2 reproduction (bounds +-0.05, MC within 3 combined se, < 5 min)"};
    const auto t0 = std::chrono::steady_clock::now();
    const MonitoringGrid grid = continuous_uniform_approx(1.0, 500);
    const RateCurve curve = RateCurve::constant(0.1);
    const GEstimate g = estimate_g(kVolume, grid, 1'000'000, 20240901);
    const double lb_ref[3] = {14.198, 19.612, 25.591};
    const double ub_ref[3] = {14.204, 19.650, 25.784};
    const double mc_ref[3] = {14.199, 19.6406, 25.642};
    const double mc_se_ref[3] = {0.0019, 0.0083, 0.014};
    const double sigmas[3] = {0.1, 0.5, 0.8};
    std::string detail;
    bool pass = true;
    for (int i = 0; i < 3; ++i) {
        const auto [lo, hi] = vwap_bounds(curve, sigmas[i], 110.0, 100.0, grid, g);
        McConfig cfg;
        cfg.paths = 10'000'000;
        cfg.seed = 20240901 + static_cast<std::uint64_t>(i) + 1;
        const McEstimate est =
            mc_vwap_price(curve, sigmas[i], 110.0, 100.0, grid, kVolume, cfg);
        const double d_lb = std::abs(lo.value - lb_ref[i]);
        const double d_ub = std::abs(hi.value - ub_ref[i]);
        const double band = 3.0 * std::hypot(mc_se_ref[i], est.std_error);
        const double d_mc = std::abs(est.mean - mc_ref[i]);
        if (d_lb > 0.05 || d_ub > 0.05 || d_mc > band) pass = false;
        detail += "sigma " + fmt(sigmas[i]) + ": dLB " + fmt(d_lb) + ", dUB " + fmt(d_ub) +
                  ", dMC " + fmt(d_mc) + " (band " + fmt(band) + "); ";
    }
    out.seconds = seconds_since(t0);
    if (out.seconds >= 300.0) pass = false;
    out.pass = pass;
    out.detail = detail;
    return out;
}

Outcome criterion_black_scholes() {
    Outcome out{"single-date degeneracy vs Black-Scholes (50 random sets)"};
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 gen(2718281);
    double worst_lb1 = 0.0, worst_ub1 = 0.0, worst_lb2 = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const ParamSet p = draw_params(gen);
        const MonitoringGrid grid = uniform_discrete(p.maturity, 1);
        const GaussianAvgModel model = build_model(p.curve, p.sigma, grid);
        const double bs = oracle::black_scholes_call(100.0, 100.0 * p.moneyness, p.sigma,
                                                     p.maturity, model.r_maturity);
        worst_lb1 = std::max(worst_lb1, std::abs(lb1(model, p.moneyness, 100.0).value - bs));
        worst_ub1 = std::max(worst_ub1, std::abs(ub1(model, p.moneyness, 100.0).value - bs));
        worst_lb2 = std::max(worst_lb2, std::abs(lb2(model, p.moneyness, 100.0).value - bs));
    }
    out.seconds = seconds_since(t0);
    out.pass = worst_lb1 <= 1e-7 && worst_ub1 <= 1e-6 && worst_lb2 <= 1e-6;
    out.detail = "max |LB1-BS| = " + fmt(worst_lb1) + ", max |UB1-BS| = " + fmt(worst_ub1) +
                 ", max |LB2-BS| = " + fmt(worst_lb2);
    return out;
}

Outcome criterion_sandwich() {
    Outcome out{"sandwich sweep: LB2 <= LB1 <= MC+3se, MC-3se <= UB1 (200 sets, 1e6 paths)"};
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 gen(3141592);
    int violations = 0, empty_samples = 0;
    std::string first;
    for (int rep = 0; rep < 200; ++rep) {
        const ParamSet p = draw_params(gen);
        const MonitoringGrid grid = uniform_discrete(p.maturity, p.n);
        const GaussianAvgModel model = build_model(p.curve, p.sigma, grid);
        const double l2 = lb2(model, p.moneyness, 100.0).value;
        const double l1 = lb1(model, p.moneyness, 100.0).value;
        const double u1 = ub1(model, p.moneyness, 100.0).value;
        McConfig cfg;
        cfg.paths = 1'000'000;
        cfg.seed = 5000 + static_cast<std::uint64_t>(rep);
        const McEstimate est =
            mc_asian_price(p.curve, p.sigma, 100.0, 100.0 * p.moneyness, grid, cfg);
        bool ok;
        if (est.mean == 0.0 && est.std_error == 0.0) {
            // Not one of the 1e6 paths finished in the money, so the +-3se band
            // carries no information. The orderings still must hold, and the
            // model's own exercise probability must rate an empty sample
            // plausible (expected in-the-money count below ~14, i.e.
            // P(no hit) >= e^-14); a larger value would expose a Monte Carlo bug.
            ++empty_samples;
            const auto root = detail::conditional_mean_root(model, p.moneyness);
            double p_itm = 0.0;
            if (root.kind == detail::RootKind::interior)
                p_itm = norm_cdf((model.mean_avg - root.y) /
                                 (model.sigma * std::sqrt(model.avg_var)));
            else if (root.kind == detail::RootKind::below_range)
                p_itm = 1.0;
            ok = l2 <= l1 + 1e-9 && l1 <= u1 + 1e-9 &&
                 static_cast<double>(cfg.paths) * p_itm <= 14.0;
        } else {
            ok = l2 <= l1 + 1e-9 && l1 <= est.mean + 3.0 * est.std_error &&
                 est.mean - 3.0 * est.std_error <= u1;
        }
        if (!ok) {
            ++violations;
            if (first.empty())
                first = "; first at set " + std::to_string(rep) + " (LB2 " + fmt(l2) +
                        ", LB1 " + fmt(l1) + ", MC " + fmt(est.mean) + " +- " +
                        fmt(est.std_error) + ", UB1 " + fmt(u1) + ")";
        }
    }
    out.seconds = seconds_since(t0);
    out.pass = violations == 0;
    out.detail = std::to_string(violations) + " violations, " +
                 std::to_string(empty_samples) + " deep out-of-the-money sets with no " +
                 "sampled payoff (rarity-checked instead)" + first;
    return out;
}

Outcome criterion_covariance() {
    Outcome out{"covariance oracles: V_N formula (N = 1..200) and brute-force sums"};
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (const double maturity : {1.0, 2.7, 9.0}) {
        for (std::size_t n = 1; n <= 200; ++n) {
            const double got = avg_variance(uniform_discrete(maturity, n));
            const double want = oracle::uniform_avg_variance(maturity, n);
            worst = std::max(worst, std::abs(got / want - 1.0));
        }
    }
    double worst_brute = 0.0;
    std::mt19937 gen(1618);
    std::uniform_real_distribution<double> wd(0.0, 1.0), ud(0.01, 8.0);
    std::uniform_int_distribution<std::size_t> sz(2, 32);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = sz(gen);
        std::vector<double> dates(n), weights(n);
        for (auto& u : dates) u = ud(gen);
        std::sort(dates.begin(), dates.end());
        for (std::size_t i = 1; i < n; ++i)
            if (dates[i] <= dates[i - 1]) dates[i] = dates[i - 1] * (1.0 + 1e-6) + 1e-9;
        for (auto& w : weights) w = wd(gen) + 1e-3;
        const MonitoringGrid grid = custom_grid(dates.back(), dates, weights);
        const double got = avg_variance(grid);
        const double want = oracle::brute_avg_variance(grid.dates, grid.indicator_weights);
        worst_brute = std::max(worst_brute, std::abs(got / want - 1.0));
    }
    out.seconds = seconds_since(t0);
    out.pass = worst <= 1e-12 && worst_brute <= 1e-12;
    out.detail = "max rel dev: formula " + fmt(worst) + ", brute force " + fmt(worst_brute);
    return out;
}

Outcome criterion_martingale() {
    Outcome out{"vanishing strike: every bound and the MC hit the discounted forward"};
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    int idx = 0;
    const std::array<std::tuple<RateCurve, double, std::size_t>, 3> cases = {{
        {RateCurve::sinusoidal(0.09, 1.0), 1.0, 10},
        {RateCurve::sinusoidal(0.09, 1.0), 9.0, 50},
        {RateCurve::constant(0.05), 2.0, 16},
    }};
    for (const auto& [curve, maturity, n] : cases) {
        const MonitoringGrid grid = uniform_discrete(maturity, n);
        const GaussianAvgModel model = build_model(curve, 0.3, grid);
        const double c = 1e-12;
        const double target = full_mean_value(model, c, 100.0);
        const double d1 = std::abs(lb1(model, c, 100.0).value / target - 1.0);
        const double d2 = std::abs(ub1(model, c, 100.0).value / target - 1.0);
        const double d3 = std::abs(lb2(model, c, 100.0).value / target - 1.0);
        McConfig cfg;
        cfg.paths = 1'000'000;
        cfg.seed = 999 + static_cast<std::uint64_t>(idx++);
        const McEstimate est = mc_asian_price(curve, 0.3, 100.0, 1e-10, grid, cfg);
        const bool mc_ok = std::abs(est.mean - target) <= 3.0 * est.std_error;
        if (d1 > 1e-6 || d2 > 1e-6 || d3 > 1e-6 || !mc_ok) pass = false;
        detail += "rel dev " + fmt(std::max({d1, d2, d3})) + ", MC dev " +
                  fmt(std::abs(est.mean - target)) + " (3se " + fmt(3.0 * est.std_error) +
                  "); ";
    }
    out.seconds = seconds_since(t0);
    out.pass = pass;
    out.detail = detail;
    return out;
}

Outcome criterion_stability() {
    Outcome out{"quadrature/optimizer stability: 64->128 nodes, tol 1e-8->1e-10, < 5e-5"};
    const auto t0 = std::chrono::steady_clock::now();
    BoundsConfig coarse;
    BoundsConfig fine;
    fine.hermite_nodes = 128;
    fine.opt_tol = 1e-10;
    double worst = 0.0;
    for (const auto& cell : kTable1) {
        const BoundsTriple a = table1_cell(cell, coarse);
        const BoundsTriple b = table1_cell(cell, fine);
        worst = std::max({worst, std::abs(a.lb1 - b.lb1), std::abs(a.ub1 - b.ub1)});
    }
    out.seconds = seconds_since(t0);
    out.pass = worst < 5e-5;
    out.detail = "max cell change = " + fmt(worst);
    return out;
}

Outcome criterion_determinism() {
    Outcome out{"table2 CSV is byte-identical across worker counts (same seed)"};
    const auto t0 = std::chrono::steady_clock::now();
    const std::string args = "table2 --g-paths 200000 --mc-paths 1000000 --seed 5";
    const std::string one = run_cli_capture(args + " --workers 1");
    const std::string three = run_cli_capture(args + " --workers 3");
    out.seconds = seconds_since(t0);
    out.pass = !one.empty() && one == three && one.find("sigma,LB1,MC,MC_stderr,UB1") == 0;
    out.detail = out.pass ? "identical (" + std::to_string(one.size()) + " bytes)"
                          : "outputs differ or are empty";
    return out;
}

}  // namespace

int main() {
    std::vector<Outcome> results;
    results.push_back(criterion_table1());
    results.push_back(criterion_table2());
    results.push_back(criterion_black_scholes());
    results.push_back(criterion_sandwich());
    results.push_back(criterion_covariance());
    results.push_back(criterion_martingale());
    results.push_back(criterion_stability());
    results.push_back(criterion_determinism());

    int failed = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const Outcome& r = results[i];
        if (!r.pass) ++failed;
        std::printf("[%zu/%zu] %s %s -- %s (%.1f s)\n", i + 1, results.size(),
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
    }
    std::printf("acceptance: %zu/%zu criteria passed\n", results.size() - failed,
                results.size());
    return failed == 0 ? 0 : 1;
}
