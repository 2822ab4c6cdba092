#include <cmath>
#include <cstdio>
#include <filesystem>

#include "asianbounds/vwap.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace asianbounds;

namespace {
const VolumeModel kPaperVolume{2.0, 22.0, 5.0, 22.0};
}

TEST_CASE("volume model validation") {
    CHECK_THROWS_AS(validate(VolumeModel{0.0, 22.0, 5.0, 22.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(VolumeModel{-1.0, 22.0, 5.0, 22.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(VolumeModel{2.0, 22.0, -5.0, 22.0}), std::invalid_argument);
    CHECK_NOTHROW(validate(kPaperVolume));
}

TEST_CASE("simulate_volume_path") {
    SUBCASE("deterministic at the fixed point") {
        const VolumeModel still{2.0, 22.0, 0.0, 22.0};
        const auto path = simulate_volume_path(still, uniform_discrete(1.0, 8), 1);
        for (double u : path) CHECK(u == doctest::Approx(484.0).epsilon(1e-15));
    }
    SUBCASE("deterministic decay follows the exact transition mean") {
        const VolumeModel drift{2.0, 22.0, 0.0, 24.0};
        const auto path = simulate_volume_path(drift, uniform_discrete(0.5, 1), 1);
        const double y = 22.0 + 2.0 * std::exp(-1.0);
        CHECK(path[0] == doctest::Approx(y * y).epsilon(1e-14));
    }
    SUBCASE("long-run second moment") {
        // E U_t -> theta^2 + eta^2/(2 lambda) = 490.25
        const MonitoringGrid grid = uniform_discrete(2.0, 4);
        const std::size_t n = 20000;
        long double acc = 0.0L, acc_sq = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = simulate_volume_path(kPaperVolume, grid, 1000 + i).back();
            acc += u;
            acc_sq += u * u;
        }
        const double mean = static_cast<double>(acc / n);
        const double se = std::sqrt(
            static_cast<double>((acc_sq - acc * acc / n) / (n - 1.0L) / n));
        const double exact = 484.0 + 25.0 / 4.0 * (1.0 - std::exp(-8.0));
        CHECK(std::abs(mean - exact) <= 3.0 * se);
    }
}

TEST_CASE("estimate_g") {
    const MonitoringGrid grid = uniform_discrete(1.0, 16);

    SUBCASE("constant volume gives unit weights with zero error") {
        const VolumeModel still{2.0, 22.0, 0.0, 22.0};
        const GEstimate est = estimate_g(still, grid, 100, 7);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(est.g[i] == 1.0);
            CHECK(est.std_error[i] == 0.0);
        }
    }

    SUBCASE("weighted mean of g is one by construction") {
        for (const MonitoringGrid& g :
             {uniform_discrete(1.0, 16), continuous_uniform_approx(1.0, 16)}) {
            const GEstimate est = estimate_g(kPaperVolume, g, 20000, 9);
            long double acc = 0.0L;
            for (std::size_t i = 0; i < g.size(); ++i)
                acc += static_cast<long double>(g.indicator_weights[i]) * est.g[i];
            CHECK(std::abs(static_cast<double>(acc) - 1.0) < 1e-13);
        }
    }

    SUBCASE("deterministic given seed, for any worker count") {
        const GEstimate a = estimate_g(kPaperVolume, grid, 150000, 13, 1);
        const GEstimate b = estimate_g(kPaperVolume, grid, 150000, 13, 3);
        CHECK(a.g == b.g);
        CHECK(a.std_error == b.std_error);
    }

    SUBCASE("frozen profile for the benchmark volume model") {
        // 250 uniform dates, 1e6 paths; the early dates carry the largest
        // weight (the start of the path is deterministic, the average is not).
        const GEstimate est =
            estimate_g(kPaperVolume, uniform_discrete(1.0, 250), 1'000'000, 424242);
        CHECK(est.g[0] == doctest::Approx(1.00980686172476).epsilon(1e-12));
        CHECK(est.g[124] == doctest::Approx(0.996776091266854).epsilon(1e-12));
        CHECK(est.g[249] == doctest::Approx(1.00328979120585).epsilon(1e-12));
        CHECK(est.g[0] > 1.0);
        CHECK(est.std_error[0] < 3e-4);
    }

    SUBCASE("degenerate volume is an error") {
        const VolumeModel dead{1.0, 0.0, 0.0, 0.0};
        CHECK_THROWS_AS(estimate_g(dead, grid, 10, 1), std::runtime_error);
        CHECK_THROWS_AS(estimate_g(kPaperVolume, grid, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("vwap_bounds") {
    const RateCurve curve = RateCurve::constant(0.1);

    SUBCASE("unit weights reduce to the plain Asian bounds") {
        const MonitoringGrid grid = uniform_discrete(1.0, 20);
        const VolumeModel still{2.0, 22.0, 0.0, 22.0};
        const GEstimate ones = estimate_g(still, grid, 50, 3);
        const auto [lo, hi] = vwap_bounds(curve, 0.3, 110.0, 100.0, grid, ones);
        const GaussianAvgModel model = build_model(curve, 0.3, grid);
        CHECK(lo.value == lb1(model, 100.0 / 110.0, 110.0).value);
        CHECK(hi.value == ub1(model, 100.0 / 110.0, 110.0).value);
    }

    SUBCASE("bounds sandwich the joint Monte Carlo price") {
        const MonitoringGrid grid = continuous_uniform_approx(1.0, 200);
        const GEstimate g = estimate_g(kPaperVolume, grid, 200'000, 21);
        const auto [lo, hi] = vwap_bounds(curve, 0.5, 110.0, 100.0, grid, g);
        McConfig cfg;
        cfg.paths = 400'000;
        cfg.seed = 29;
        const McEstimate est = mc_vwap_price(curve, 0.5, 110.0, 100.0, grid, kPaperVolume, cfg);
        CHECK(lo.value <= est.mean + 3.0 * est.std_error);
        CHECK(est.mean - 3.0 * est.std_error <= hi.value);
        CHECK(lo.value < hi.value);
    }

    SUBCASE("validation") {
        const MonitoringGrid grid = uniform_discrete(1.0, 4);
        GEstimate wrong;
        wrong.g = {1.0, 1.0};
        wrong.std_error = {0.0, 0.0};
        CHECK_THROWS_AS(vwap_bounds(curve, 0.3, 110.0, 100.0, grid, wrong),
                        std::invalid_argument);
    }
}

TEST_CASE("g estimates round-trip through files") {
    const MonitoringGrid grid = uniform_discrete(1.0, 12);
    const GEstimate est = estimate_g(kPaperVolume, grid, 5000, 77);
    const auto path = std::filesystem::temp_directory_path() / "asianbounds_g_test.txt";
    save_g_estimate(path.string(), grid, est);
    const GEstimate back = load_g_estimate(path.string(), grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(back.g[i] == doctest::Approx(est.g[i]).epsilon(1e-14));
    const MonitoringGrid other = uniform_discrete(2.0, 12);
    CHECK_THROWS_AS(load_g_estimate(path.string(), other), std::invalid_argument);
    const MonitoringGrid shorter = uniform_discrete(1.0, 5);
    CHECK_THROWS_AS(load_g_estimate(path.string(), shorter), std::invalid_argument);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_g_estimate("/nonexistent/g.txt", grid), std::invalid_argument);
}
