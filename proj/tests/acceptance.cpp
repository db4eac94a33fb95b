// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Each criterion is self-contained and catches its own errors.
#include "fbns/cli.hpp"
#include "fbns/kernels.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace fbns;
using clock_t_ = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %d (%s): %s — %s\n", number, name.c_str(),
                pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run(int number, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& body) {
    try {
        auto [pass, detail] = body();
        report(number, name, pass, detail);
    } catch (const std::exception& e) {
        report(number, name, false, std::string("exception: ") + e.what());
    }
}

double seconds_since(clock_t_::time_point t0) {
    return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

PhysicalProblem config_a() {  // linear flux, compatible bump
    return make_bump_problem(1.0, 1.0, 1.0, FluxSpec::linear(0.05, 0.05), 0.05);
}
PhysicalProblem config_b() {  // exponential flux, wider slab
    return make_bump_problem(0.9, 0.8, 1.2, FluxSpec::exponential(0.02, 0.1), 0.02 / 0.9);
}
PhysicalProblem config_c() {  // constant flux, curved profile
    return make_bump_problem(1.3, 1.2, 0.8, FluxSpec::constant(0.03), 0.03 / 1.3, 0.05);
}
PhysicalProblem trivial_config() {
    return make_constant_problem(1.0, 1.0, 1.0, FluxSpec::constant(0.0));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

// --------------------------------------------------------------------------

static std::pair<bool, std::string> criterion1() {
    const auto t0 = clock_t_::now();
    const PhysicalProblem p = trivial_config();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);
    const double sigma = std::min(led.sigma_star, 1.0);
    const DensityState st = outer_solve(tp, p, TimeGrid(sigma, 256));
    const PhysicalSolution sol = invert_segment(st, tp, p);

    double u_err = 0.0, s_err = 0.0;
    for (Eigen::Index k = 0; k < sol.slices(); ++k) {
        u_err = std::max(u_err, (sol.u[k].array() - 1.0).abs().maxCoeff());
        const double s_exact = 1.0 + sol.times[k];
        s_err = std::max(s_err, std::abs(sol.s[k] - s_exact) / s_exact);
    }
    const double el = seconds_since(t0);
    const bool pass = u_err <= 1e-8 && s_err <= 1e-6 && el < 5.0;
    return {pass, "sup|u-beta| = " + fmt(u_err) + " (<=1e-8), rel front error = " +
                      fmt(s_err) + " (<=1e-6), " + fmt(el) + " s"};
}

static std::pair<bool, std::string> criterion2() {
    const auto t0 = clock_t_::now();
    double norm_err = 0.0;
    for (double s : {0.01, 0.5, 2.0})
        norm_err = std::max(
            norm_err, std::abs(integrate_gaussian([](double) { return 1.0; }, -60.0,
                                                  60.0, 0.3, s, 1.0) -
                               1.0));

    bool exact_zeros = true;
    for (double xi : {0.2, 0.9}) {
        if (eval_image_kernel(ImageKind::Green, KernelDeriv::none,
                              {0.0, 1.0, xi, 0.0, 1.0}) != 0.0)
            exact_zeros = false;
        if (eval_image_kernel(ImageKind::Neumann, KernelDeriv::d_x,
                              {0.0, 1.0, xi, 0.0, 1.0}) != 0.0)
            exact_zeros = false;
    }

    double fd_err = 0.0;
    for (ImageKind kind : {ImageKind::Green, ImageKind::Neumann}) {
        for (double s : {0.01, 0.3}) {
            const double x = 0.55, xi = 0.4, t = 1.0, tau = 1.0 - s, D = 0.9;
            auto at = [&](double xx, double ttau) {
                return eval_image_kernel(kind, KernelDeriv::none, {xx, t, xi, ttau, D});
            };
            auto rel = [](double a, double b) {
                return std::abs(a - b) / std::max(std::abs(b), 1e-300);
            };
            // fourth-order stencils; step scaled to the variable so both the
            // truncation and the cancellation error sit below 1e-8
            auto d1 = [](auto f, double e) {
                return (f(-2 * e) - 8 * f(-e) + 8 * f(e) - f(2 * e)) / (12 * e);
            };
            auto d2 = [](auto f, double e) {
                return (-f(2 * e) + 16 * f(e) - 30 * f(0.0) + 16 * f(-e) - f(-2 * e)) /
                       (12 * e * e);
            };
            auto fx = [&](double e) { return at(x + e, tau); };
            auto ftau = [&](double e) { return at(x, tau + e); };
            const double ex = 1e-3, etau = 1e-4 * s;

            const KernelQuery q{x, t, xi, tau, D};
            fd_err = std::max(fd_err, rel(eval_image_kernel(kind, KernelDeriv::d_x, q),
                                          d1(fx, ex)));
            fd_err = std::max(fd_err, rel(eval_image_kernel(kind, KernelDeriv::d_tau, q),
                                          d1(ftau, etau)));
            fd_err = std::max(fd_err, rel(eval_image_kernel(kind, KernelDeriv::d_xx, q),
                                          d2(fx, ex)));
        }
    }
    const double el = seconds_since(t0);
    const bool pass = norm_err <= 1e-8 && exact_zeros && fd_err <= 1e-6 && el < 1.0;
    return {pass, "normalization defect = " + fmt(norm_err) +
                      " (<=1e-8), boundary zeros exact = " +
                      (exact_zeros ? std::string("yes") : std::string("no")) +
                      ", derivative-vs-FD rel = " + fmt(fd_err) + " (<=1e-6), " +
                      fmt(el) + " s"};
}

static std::pair<bool, std::string> criterion3() {
    bool pass = true;
    std::ostringstream os;
    int idx = 0;
    for (const PhysicalProblem& p : {config_a(), config_b(), config_c()}) {
        const auto t0 = clock_t_::now();
        const TransformedProblem tp = build_transformed_problem(p);
        const ConstantsLedger led = compute_constants(tp, p);
        const TimeGrid grid(led.sigma_star, 256);
        const DensityState st = outer_solve(tp, p, grid);

        double rmax = 0.0;
        for (double r : st.contraction_ratios) rmax = std::max(rmax, r);
        auto [p1, p2] = apply_psi(st.chi1, st.chi2, st.w0, tp, p, grid);
        const double fixed_defect = (p1 - st.chi1).cwiseAbs().maxCoeff() +
                                    (p2 - st.chi2).cwiseAbs().maxCoeff();
        const double el = seconds_since(t0);
        const bool ok = rmax < 1.0 && fixed_defect <= 10.0 * 1e-10 && el < 30.0;
        pass = pass && ok;
        os << (idx ? "; " : "") << "cfg" << char('a' + idx) << ": max ratio = "
           << fmt(rmax) << ", |Psi(chi)-chi| = " << fmt(fixed_defect) << ", "
           << fmt(el) << " s";
        ++idx;
    }
    return {pass, os.str()};
}

static std::pair<bool, std::string> criterion4() {
    bool pass = true;
    std::ostringstream os;
    int idx = 0;
    for (const PhysicalProblem& p : {config_a(), config_b(), config_c()}) {
        const TransformedProblem tp = build_transformed_problem(p);
        const ConstantsLedger led = compute_constants(tp, p);
        const DensityState st = outer_solve(tp, p, TimeGrid(led.sigma_star, 256));

        int violations = 0;
        for (int m = 0; m <= 256; ++m) {
            if (st.y0[m] < 0.5 * tp.C1 || st.y0[m] > 1.5 * tp.C1) ++violations;
            if (st.y1[m] < 0.5 * tp.C2 || st.y1[m] > 1.5 * tp.C2) ++violations;
            if (st.w0[m] < 1.0 || st.w0[m] > led.R) ++violations;
        }
        const double chi_sup = std::max(st.chi1.cwiseAbs().maxCoeff(),
                                        st.chi2.cwiseAbs().maxCoeff());
        if (chi_sup > led.M) ++violations;
        pass = pass && violations == 0;
        os << (idx ? "; " : "") << "cfg" << char('a' + idx) << ": violations = "
           << violations << ", sup|chi| = " << fmt(chi_sup) << " vs M = " << fmt(led.M);
        ++idx;
    }
    return {pass, os.str()};
}

static std::pair<bool, std::string> criterion5() {
    const PhysicalProblem p = config_a();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);
    const double Fn = tp.F.sup_norm();

    auto upper_residual = [&](double sigma, int N) {
        const TimeGrid grid(sigma, N);
        const DensityState st = outer_solve(tp, p, grid);
        const BoundaryEval be(st.chi1, st.chi2, st.w0, p.g, grid, tp.C1, tp.C2, p.D,
                              p.beta);
        double wmax = 0.0;
        for (int m = 1; m <= N; ++m) {
            const double t = grid.node(m);
            wmax = std::max(wmax, std::abs(reconstruct_w(st, tp, p, be.y1(t), t)));
        }
        return wmax;
    };

    const double w_default = upper_residual(led.sigma_star, 256);
    // The defect at the certified horizon sits at the double-precision floor,
    // so the refinement factor is measured at a longer (uncertified) horizon
    // where discretization error dominates.
    const double w_coarse = upper_residual(1e-2, 256);
    const double w_fine = upper_residual(1e-2, 512);
    const double factor = w_coarse / std::max(w_fine, 1e-300);

    const DensityState st = outer_solve(tp, p, TimeGrid(led.sigma_star, 256));
    const PhysicalSolution sol = invert_segment(st, tp, p);
    const ResidualReport r = residual_report(sol, st, tp, p);
    const double neumann_cap = 0.05 * std::max(p.g.sup_norm(1.0), p.beta);

    const DensityState st2 = outer_solve(tp, p, TimeGrid(led.sigma_star, 512));
    const PhysicalSolution sol2 = invert_segment(st2, tp, p);
    const ResidualReport r2 = residual_report(sol2, st2, tp, p);

    const bool pass = w_default <= 5e-3 * Fn && factor >= 1.8 &&
                      r.dirichlet_sup <= 1e-6 && r.neumann_sup <= neumann_cap &&
                      r2.neumann_sup < r.neumann_sup;
    return {pass, "|w(y1)| = " + fmt(w_default) + " (<= " + fmt(5e-3 * Fn) +
                      "), refinement factor = " + fmt(factor) +
                      " (>=1.8, at extended horizon 1e-2), |u(s)-beta| = " +
                      fmt(r.dirichlet_sup) + " (<=1e-6), flux residual = " +
                      fmt(r.neumann_sup) + " (<= " + fmt(neumann_cap) +
                      "), refined flux residual = " + fmt(r2.neumann_sup)};
}

static std::pair<bool, std::string> criterion6() {
    const auto t0 = clock_t_::now();
    const PhysicalProblem p = config_a();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);

    auto front_error = [&](int N, int Nx, int Ny) {
        const DensityState st = outer_solve(tp, p, TimeGrid(led.sigma_star, N), 1e-8,
                                            1.0, 50, Ny);
        const PhysicalSolution sol = invert_segment(st, tp, p, Ny);
        FrontFixGrid fg;
        fg.Nx = Nx;
        fg.T = led.sigma_star;
        const FrontFixSolution oracle = solve_frontfix(p, fg);
        return compare(sol, oracle, sol.times).s_sup_rel;
    };

    const double e1 = front_error(256, 200, 65);
    const double e2 = front_error(512, 400, 129);
    const double el = seconds_since(t0);
    const bool pass = e1 <= 0.02 && e2 <= e1 && el < 60.0;
    return {pass, "relative front sup-error = " + fmt(e1) + " (<=0.02), refined = " +
                      fmt(e2) + ", " + fmt(el) + " s"};
}

static std::pair<bool, std::string> criterion7() {
    const auto t0 = clock_t_::now();
    bool pass = true;
    std::ostringstream os;
    int idx = 0;
    for (const PhysicalProblem& p : {config_a(), config_b(), config_c()}) {
        const TransformedProblem tp = build_transformed_problem(p);
        const ConstantsLedger led = compute_constants(tp, p);
        const bool ok = led.admissible(led.sigma_star) &&
                        !led.admissible(1.01 * led.sigma_star);
        pass = pass && ok;
        os << (idx ? "; " : "") << "cfg" << char('a' + idx)
           << ": sigma* = " << fmt(led.sigma_star) << (ok ? " certified" : " NOT certified");
        ++idx;
    }
    const double el = seconds_since(t0);
    pass = pass && el < 1.0;
    os << "; " << fmt(el) << " s";
    return {pass, os.str()};
}

static std::pair<bool, std::string> criterion8() {
    bool pass = true;
    std::ostringstream os;
    int idx = 0;
    for (const PhysicalProblem& p : {config_a(), config_b(), config_c()}) {
        const TransformedProblem tp = build_transformed_problem(p);
        const ConstantsLedger led = compute_constants(tp, p);
        const DensityState st = outer_solve(tp, p, TimeGrid(led.sigma_star, 32));
        const SliceInversion si = invert_state(st, tp, p, 0.0);
        double err = std::abs(si.s - p.b);
        for (Eigen::Index k = 0; k < si.x.size(); ++k)
            err = std::max(err, std::abs(si.u[k] - p.u0(si.x[k])));
        pass = pass && err <= 1e-4;
        os << (idx ? "; " : "") << "cfg" << char('a' + idx) << ": sup error = "
           << fmt(err);
        ++idx;
    }
    return {pass, os.str() + " (<=1e-4 each)"};
}

static std::pair<bool, std::string> criterion9() {
    // exactness on trivial data across three segments
    const PhysicalProblem pt = trivial_config();
    const TransformedProblem tpt = build_transformed_problem(pt);
    const ConstantsLedger ledt = compute_constants(tpt, pt);
    const SegmentChain tchain = extend_solution(tpt, pt, 2.5 * ledt.sigma_star, 64);
    const PhysicalSolution tsol = invert_chain(tchain);
    double u_err = 0.0, s_err = 0.0;
    for (Eigen::Index k = 0; k < tsol.slices(); ++k) {
        u_err = std::max(u_err, (tsol.u[k].array() - 1.0).abs().maxCoeff());
        s_err = std::max(s_err,
                         std::abs(tsol.s[k] - (1.0 + tsol.times[k])) /
                             (1.0 + tsol.times[k]));
    }

    // generic data: continuity of the boundary curves and a monotone front
    const PhysicalProblem p = config_a();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);
    const SegmentChain chain = extend_solution(tp, p, 2.5 * led.sigma_star, 64);
    double join_defect = 0.0;
    for (size_t i = 0; i + 1 < chain.segments.size(); ++i) {
        const Segment& a = chain.segments[i];
        const Segment& b = chain.segments[i + 1];
        const int N = a.state.grid.N;
        join_defect = std::max(join_defect, std::abs(b.tp.C1 - a.state.y0[N]));
        join_defect = std::max(join_defect, std::abs(b.tp.C2 - a.state.y1[N]));
    }
    const PhysicalSolution sol = invert_chain(chain);
    bool monotone = true;
    for (Eigen::Index k = 0; k + 1 < sol.slices(); ++k)
        if (sol.s[k + 1] < sol.s[k]) monotone = false;

    const bool pass = tchain.segments.size() >= 3 && u_err <= 1e-8 && s_err <= 1e-6 &&
                      chain.segments.size() >= 3 && join_defect <= 1e-8 && monotone;
    return {pass, "trivial chain (" + std::to_string(tchain.segments.size()) +
                      " segments): sup|u-beta| = " + fmt(u_err) + ", rel front error = " +
                      fmt(s_err) + "; generic chain (" +
                      std::to_string(chain.segments.size()) +
                      " segments): join defect = " + fmt(join_defect) +
                      " (<=1e-8), front monotone = " + (monotone ? "yes" : "NO")};
}

int main() {
    run(1, "exact trivial solution", criterion1);
    run(2, "kernel suite", criterion2);
    run(3, "contraction evidence", criterion3);
    run(4, "a-priori boxes", criterion4);
    run(5, "boundary-condition residuals", criterion5);
    run(6, "oracle cross-validation", criterion6);
    run(7, "admissible horizon certification", criterion7);
    run(8, "round-trip identity", criterion8);
    run(9, "extension chaining", criterion9);

    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures ? 1 : 0;
}
