#include "fbns/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fbns {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, int line) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw InvalidInputError("config line " + std::to_string(line) +
                                ": cannot parse number '" + v + "'");
    }
}

int to_int(const std::string& v, int line) {
    const double x = to_double(v, line);
    if (x != std::floor(x))
        throw InvalidInputError("config line " + std::to_string(line) +
                                ": expected an integer, got '" + v + "'");
    return int(x);
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot open " + path.string() + " for writing");
    out << header << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << fmt17(row[i]);
        }
        out << "\n";
    }
}

void write_summary(const fs::path& dir, const json& summary) {
    std::ofstream out(dir / "run.json");
    out << summary.dump(2) << "\n";
}

json validation_json(const ValidationReport& vr) {
    json checks = json::array();
    for (const auto& c : vr.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"defect", c.defect}});
    return {{"pass", vr.pass}, {"checks", checks}, {"g_sup", vr.g_sup}, {"g_c1", vr.g_c1}};
}

void write_constants_csv(const fs::path& dir, const ConstantsLedger& led) {
    std::vector<std::vector<double>> rows;
    std::ostringstream names;
    std::ofstream out(dir / "constants.csv");
    out << "constant (name),value (dimensionless)\n";
    for (int k = 0; k <= 10; ++k) out << "E" << k << "," << fmt17(led.E[size_t(k)]) << "\n";
    for (int k = 0; k <= 10; ++k) out << "F" << k << "," << fmt17(led.F[size_t(k)]) << "\n";
    out << "M," << fmt17(led.M) << "\n";
    out << "H," << fmt17(led.H) << "\n";
    out << "R," << fmt17(led.R) << "\n";
    for (const auto& b : led.bounds) out << b.name << "," << fmt17(b.bound) << "\n";
    out << "sigma_star," << fmt17(led.sigma_star) << "\n";
}

void write_chain_artifacts(const fs::path& dir, const SegmentChain& chain,
                           const PhysicalSolution& sol) {
    std::vector<std::vector<double>> dens, bnds, front, slices;
    for (size_t i = 0; i < chain.segments.size(); ++i) {
        const Segment& seg = chain.segments[i];
        const DensityState& st = seg.state;
        const int N = st.grid.N;
        for (int j = 0; j < N; ++j) {
            const double tm = seg.t_offset + st.grid.midpoint(j);
            dens.push_back({tm, st.chi1[j], st.chi2[j], 0.5 * (st.w0[j] + st.w0[j + 1])});
        }
        for (int m = (i == 0 ? 0 : 1); m <= N; ++m)
            bnds.push_back({seg.t_offset + st.grid.node(m), st.y0[m], st.y1[m],
                            st.C_of_t[m]});
    }
    write_csv(dir / "densities.csv", "t (time),chi1 (density),chi2 (density),w0 (density)",
              dens);
    write_csv(dir / "boundaries.csv", "t (time),y0 (heat frame),y1 (heat frame),C (dimensionless)",
              bnds);

    for (Eigen::Index k = 0; k < sol.slices(); ++k) {
        front.push_back({sol.times[k], sol.s[k]});
        for (Eigen::Index q = 0; q < sol.x[k].size(); ++q)
            slices.push_back({sol.times[k], sol.x[k][q], sol.u[k][q]});
    }
    write_csv(dir / "front.csv", "t (time),s (length)", front);
    write_csv(dir / "solution.csv", "t (time),x (length),u (concentration)", slices);
}

}  // namespace

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot read config file: " + path);
    RunConfig cfg;
    std::vector<std::string> unknown;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInputError("config line " + std::to_string(lineno) +
                                    ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw InvalidInputError("config line " + std::to_string(lineno) +
                                    ": empty key or value");

        if (key == "mode") cfg.mode = val;
        else if (key == "D") cfg.D = to_double(val, lineno);
        else if (key == "beta") cfg.beta = to_double(val, lineno);
        else if (key == "b") cfg.b = to_double(val, lineno);
        else if (key == "flux") cfg.flux_form = val;
        else if (key == "flux_a") cfg.flux_a = to_double(val, lineno);
        else if (key == "flux_b") cfg.flux_b = to_double(val, lineno);
        else if (key == "flux_table") cfg.flux_table = val;
        else if (key == "u0") cfg.u0_form = val;
        else if (key == "bump_a") cfg.bump_a = to_double(val, lineno);
        else if (key == "bump_c") cfg.bump_c = to_double(val, lineno);
        else if (key == "u0_table") cfg.u0_table = val;
        else if (key == "N") cfg.N = to_int(val, lineno);
        else if (key == "Ny") cfg.Ny = to_int(val, lineno);
        else if (key == "tol_inner") cfg.tol_inner = to_double(val, lineno);
        else if (key == "tol_outer") cfg.tol_outer = to_double(val, lineno);
        else if (key == "relax") cfg.relax = to_double(val, lineno);
        else if (key == "C1") cfg.C1 = to_double(val, lineno);
        else if (key == "sigma") cfg.sigma = to_double(val, lineno);
        else if (key == "T") cfg.T = to_double(val, lineno);
        else if (key == "Nx") cfg.Nx = to_int(val, lineno);
        else if (key == "safety") cfg.safety = to_double(val, lineno);
        else if (key == "oracle_dt") cfg.oracle_dt = to_double(val, lineno);
        else if (key == "out") cfg.out = val;
        else unknown.push_back(key);
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw InvalidInputError(msg);
    }

    static const std::vector<std::string> modes = {"solve", "solve+oracle",
                                                   "constants-only", "validate-only"};
    if (std::find(modes.begin(), modes.end(), cfg.mode) == modes.end())
        throw InvalidInputError("unknown mode: " + cfg.mode);
    if (cfg.N <= 0 || cfg.Ny <= 0 || cfg.Nx <= 0 || cfg.tol_inner <= 0.0 ||
        cfg.tol_outer <= 0.0 || cfg.relax <= 0.0 || cfg.safety <= 0.0)
        throw InvalidInputError("numeric solver knobs must be positive");
    return cfg;
}

FluxSpec make_flux(const RunConfig& cfg) {
    if (cfg.flux_form == "constant") return FluxSpec::constant(cfg.flux_a);
    if (cfg.flux_form == "linear") return FluxSpec::linear(cfg.flux_a, cfg.flux_b);
    if (cfg.flux_form == "exponential") return FluxSpec::exponential(cfg.flux_a, cfg.flux_b);
    if (cfg.flux_form == "table") {
        if (cfg.flux_table.empty()) throw InvalidInputError("flux = table needs flux_table");
        return FluxSpec::tabulated(load_table(cfg.flux_table));
    }
    throw InvalidInputError("unknown flux form: " + cfg.flux_form);
}

PhysicalProblem make_problem(const RunConfig& cfg) {
    FluxSpec g = make_flux(cfg);
    if (cfg.u0_form == "constant") return make_constant_problem(cfg.D, cfg.beta, cfg.b, g);
    if (cfg.u0_form == "bump") {
        const double a = cfg.bump_a >= 0.0 ? cfg.bump_a : g.value0() / cfg.D;
        return make_bump_problem(cfg.D, cfg.beta, cfg.b, g, a, cfg.bump_c);
    }
    if (cfg.u0_form == "table") {
        if (cfg.u0_table.empty()) throw InvalidInputError("u0 = table needs u0_table");
        PhysicalProblem p{cfg.D, cfg.beta, cfg.b, g, load_table(cfg.u0_table)};
        return p;
    }
    throw InvalidInputError("unknown u0 form: " + cfg.u0_form);
}

int run_pipeline(const RunConfig& cfg) {
    fs::create_directories(cfg.out);
    const fs::path dir(cfg.out);
    json summary;
    summary["mode"] = cfg.mode;
    summary["warnings"] = json::array();
    summary["errors"] = json::array();

    int code = 0;
    try {
        const PhysicalProblem p = make_problem(cfg);
        const ValidationReport vr = validate_problem(p);
        summary["validation"] = validation_json(vr);
        if (!vr.pass) {
            summary["errors"].push_back("validation failed:\n" + vr.to_string());
            write_summary(dir, summary);
            std::cerr << vr.to_string();
            return 2;
        }
        if (cfg.mode == "validate-only") {
            write_summary(dir, summary);
            return 0;
        }

        const TransformedProblem tp = build_transformed_problem(p, cfg.C1);
        const ConstantsLedger led = compute_constants(tp, p);
        write_constants_csv(dir, led);
        summary["sigma_star"] = led.sigma_star;
        summary["C1"] = tp.C1;
        summary["C2"] = tp.C2;
        summary["consistency_defect"] = tp.consistency_defect;
        if (cfg.mode == "constants-only") {
            write_summary(dir, summary);
            return 0;
        }

        double sigma = cfg.sigma > 0.0 ? cfg.sigma : led.sigma_star;
        if (cfg.sigma > led.sigma_star) {
            const std::string w = "requested sigma " + fmt17(cfg.sigma) +
                                  " exceeds the certified horizon " +
                                  fmt17(led.sigma_star) +
                                  "; contraction guarantees no longer apply";
            summary["warnings"].push_back(w);
            std::cerr << "warning: " << w << "\n";
        }
        const double T = cfg.T > 0.0 ? cfg.T : sigma;
        summary["sigma"] = sigma;
        summary["T"] = T;

        SegmentChain chain;
        try {
            if (cfg.sigma > 0.0 || T <= sigma * (1.0 + 1e-12)) {
                const TimeGrid grid{std::min(sigma, T), cfg.N};
                DensityState st = outer_solve(tp, p, grid, cfg.tol_outer, cfg.relax, 50,
                                              cfg.Ny, cfg.tol_inner);
                chain.segments.push_back(Segment{0.0, tp, p, led, std::move(st)});
                chain.total_horizon = grid.sigma;
            } else {
                chain = extend_solution(tp, p, T, cfg.N, cfg.tol_outer, cfg.Ny);
            }
        } catch (const PartialResultError& e) {
            summary["errors"].push_back(e.what());
            chain = e.chain;
            code = 3;
        }

        json segs = json::array();
        for (const auto& seg : chain.segments) {
            segs.push_back({{"t_offset", seg.t_offset},
                            {"sigma", seg.state.grid.sigma},
                            {"sigma_star", seg.ledger.sigma_star},
                            {"inner_iterations", seg.state.inner_iterations},
                            {"outer_iterations", seg.state.outer_iterations},
                            {"contraction_ratios", seg.state.contraction_ratios}});
        }
        summary["segments"] = segs;
        summary["horizon_reached"] = chain.total_horizon;

        if (!chain.segments.empty()) {
            const PhysicalSolution sol = invert_chain(chain, cfg.Ny);
            write_chain_artifacts(dir, chain, sol);

            ResidualReport worst;
            for (size_t i = 0; i < chain.segments.size(); ++i) {
                const Segment& seg = chain.segments[i];
                const PhysicalSolution part =
                    invert_segment(seg.state, seg.tp, seg.p, cfg.Ny, seg.t_offset);
                const ResidualReport r = residual_report(part, seg.state, seg.tp, seg.p);
                worst.pde_sup = std::max(worst.pde_sup, r.pde_sup);
                worst.neumann_sup = std::max(worst.neumann_sup, r.neumann_sup);
                worst.dirichlet_sup = std::max(worst.dirichlet_sup, r.dirichlet_sup);
                worst.stefan_sup = std::max(worst.stefan_sup, r.stefan_sup);
                worst.flux_bc_sup = std::max(worst.flux_bc_sup, r.flux_bc_sup);
                worst.flux_bc_alt_sup = std::max(worst.flux_bc_alt_sup, r.flux_bc_alt_sup);
            }
            {
                std::ofstream out(dir / "residuals.csv");
                out << "residual (name),sup (problem units)\n";
                out << "pde," << fmt17(worst.pde_sup) << "\n";
                out << "neumann," << fmt17(worst.neumann_sup) << "\n";
                out << "dirichlet," << fmt17(worst.dirichlet_sup) << "\n";
                out << "stefan," << fmt17(worst.stefan_sup) << "\n";
                out << "flux_bc," << fmt17(worst.flux_bc_sup) << "\n";
                out << "flux_bc_alt," << fmt17(worst.flux_bc_alt_sup) << "\n";
            }
            summary["residuals"] = {{"pde", worst.pde_sup},
                                    {"neumann", worst.neumann_sup},
                                    {"dirichlet", worst.dirichlet_sup},
                                    {"stefan", worst.stefan_sup},
                                    {"flux_bc", worst.flux_bc_sup},
                                    {"flux_bc_alt", worst.flux_bc_alt_sup}};

            if (cfg.mode == "solve+oracle" && code == 0) {
                FrontFixGrid fg;
                fg.Nx = cfg.Nx;
                fg.dt = cfg.oracle_dt;
                fg.T = chain.total_horizon;
                fg.safety = cfg.safety;
                const FrontFixSolution oracle = solve_frontfix(p, fg);
                const ComparisonReport cr = compare(sol, oracle, sol.times);
                std::ofstream out(dir / "comparison.csv");
                out << "metric (name),value (problem units)\n";
                out << "s_sup," << fmt17(cr.s_sup) << "\n";
                out << "s_l2," << fmt17(cr.s_l2) << "\n";
                out << "u_sup," << fmt17(cr.u_sup) << "\n";
                out << "s_sup_rel," << fmt17(cr.s_sup_rel) << "\n";
                summary["comparison"] = {{"s_sup", cr.s_sup},
                                         {"s_l2", cr.s_l2},
                                         {"u_sup", cr.u_sup},
                                         {"s_sup_rel", cr.s_sup_rel}};
            }
        }
    } catch (const NoConvergenceError& e) {
        summary["errors"].push_back(e.what());
        code = 3;
        std::cerr << "error: " << e.what() << "\n";
    } catch (const SolverError& e) {
        summary["errors"].push_back(e.what());
        code = 2;
        std::cerr << "error: " << e.what() << "\n";
    }
    write_summary(dir, summary);
    return code;
}

}  // namespace fbns
