#pragma once

#include "fbns/oracle_fd.hpp"

#include <string>

namespace fbns {

struct RunConfig {
    std::string mode = "solve";  // solve | solve+oracle | constants-only | validate-only

    // Problem data.
    double D = 1.0, beta = 1.0, b = 1.0;
    std::string flux_form = "constant";  // constant | linear | exponential | table
    double flux_a = 0.0, flux_b = 0.0;
    std::string flux_table;
    std::string u0_form = "constant";  // constant | bump | table
    double bump_a = -1.0;  // < 0 requests the compatible choice g(0)/D
    double bump_c = 0.0;
    std::string u0_table;

    // Solver knobs.
    int N = 256;
    int Ny = 65;
    double tol_inner = 1e-10;
    double tol_outer = 1e-8;
    double relax = 1.0;
    double C1 = -1.0;    // < 0 = automatic
    double sigma = 0.0;  // 0 = admissible horizon from the constants ledger
    double T = 0.0;      // 0 = single segment at the working sigma

    // Oracle knobs.
    int Nx = 200;
    double safety = 0.4;
    double oracle_dt = 0.0;

    std::string out = "out";
};

/// Flat "key = value" text with '#' comments; unknown keys are an error.
RunConfig parse_config(const std::string& path);

FluxSpec make_flux(const RunConfig& cfg);
PhysicalProblem make_problem(const RunConfig& cfg);

/// Runs the configured pipeline and writes the artifacts into cfg.out.
/// Returns the process exit code: 0 success, 2 validation failure,
/// 3 non-convergence (partial artifacts still written).
int run_pipeline(const RunConfig& cfg);

/// 17-significant-digit decimal rendering used by every CSV writer.
std::string fmt17(double v);

}  // namespace fbns
