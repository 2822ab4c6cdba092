#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "asianbounds/asianbounds.hpp"

namespace cli = asianbounds::cli;

int main(int argc, char** argv) {
    CLI::App app{"Bound and Monte Carlo pricer for averaged-payoff (Asian and VWAP) options"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    cli::RunOptions opts;
    app.add_option("--workers", opts.workers, "Monte Carlo worker threads (0 = all cores)")
        ->capture_default_str();
    app.add_option("--hermite-nodes", opts.hermite_nodes, "Hermite nodes for the upper bound")
        ->capture_default_str();
    app.add_option("--opt-tol", opts.opt_tol, "Golden-section argument tolerance")
        ->capture_default_str();

    std::string bounds_file, mc_file;
    auto* bounds_cmd =
        app.add_subcommand("bounds", "Lower/upper bounds and midpoint for a request file");
    bounds_cmd->add_option("file", bounds_file, "request file")->required();
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo reference price for a request file");
    mc_cmd->add_option("file", mc_file, "request file")->required();
    auto* table1_cmd = app.add_subcommand("table1", "Built-in benchmark table 1 (plain Asian)");
    std::uint64_t g_paths = 1'000'000, mc_paths = 10'000'000, seed = 20240901;
    auto* table2_cmd = app.add_subcommand("table2", "Built-in benchmark table 2 (VWAP)");
    table2_cmd->add_option("--g-paths", g_paths, "paths for the volume-weight estimate")
        ->capture_default_str();
    table2_cmd->add_option("--mc-paths", mc_paths, "paths for the reference prices")
        ->capture_default_str();
    table2_cmd->add_option("--seed", seed, "base seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*bounds_cmd)
            std::cout << cli::run_bounds(cli::load_request(bounds_file), opts);
        else if (*mc_cmd)
            std::cout << cli::run_mc(cli::load_request(mc_file), opts);
        else if (*table1_cmd)
            std::cout << cli::table1_csv(opts);
        else if (*table2_cmd)
            std::cout << cli::table2_csv(g_paths, mc_paths, seed, opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
