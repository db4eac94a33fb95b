#include "fbns/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <cstdlib>
#include <iostream>

namespace {

int run_mode(const std::string& config, const std::string& mode, const std::string& out,
             double sigma, int grid) {
    fbns::RunConfig cfg = fbns::parse_config(config);
    cfg.mode = mode;
    if (!out.empty()) cfg.out = out;
    if (sigma > 0.0) cfg.sigma = sigma;
    if (grid > 0) cfg.N = grid;
    return fbns::run_pipeline(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("FBP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"Free-boundary diffusion solver: integral-equation pipeline with a "
                 "finite-difference cross-check"};
    app.require_subcommand(1);

    std::string config, out;
    double sigma = 0.0;
    int grid = 0;
    app.add_option("--out", out, "output directory (overrides config)");
    app.add_option("--sigma", sigma, "working horizon (overrides config)");
    app.add_option("--grid", grid, "time cells N (overrides config)");

    auto add = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("config", config, "configuration file")->required();
        return sub;
    };
    CLI::App* c_solve = add("solve", "run the full pipeline");
    CLI::App* c_const = add("constants", "compute the constants ledger only");
    CLI::App* c_valid = add("validate", "validate the problem data only");
    CLI::App* c_comp = add("compare", "full pipeline plus the finite-difference oracle");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_solve->parsed()) return run_mode(config, "solve", out, sigma, grid);
        if (c_const->parsed()) return run_mode(config, "constants-only", out, sigma, grid);
        if (c_valid->parsed()) return run_mode(config, "validate-only", out, sigma, grid);
        if (c_comp->parsed()) return run_mode(config, "solve+oracle", out, sigma, grid);
    } catch (const fbns::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
