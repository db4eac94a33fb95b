#include "fbns/volterra.hpp"

#include "fbns/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbns {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double sup(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

// ---------------------------------------------------------------------------
// Constants ledger
// ---------------------------------------------------------------------------

bool ConstantsLedger::admissible(double sigma) const {
    for (const auto& b : bounds)
        if (sigma > b.bound) return false;
    return true;
}

ConstantsLedger compute_constants(const TransformedProblem& tp, const PhysicalProblem& p) {
    if (!(3.0 * tp.C1 < tp.C2))
        throw ConstraintViolationError("compute_constants: 3 C1 < C2 violated");

    const double D = p.D, be = p.beta;
    const double C1 = tp.C1, C2 = tp.C2;
    const double nu0 = tp.norm_u0, nu0p = tp.norm_u0p, ng = tp.norm_g;
    const double e = M_E;

    ConstantsLedger L;
    L.H = 1.0;

    const double expfac = std::exp((nu0 + be) * (C2 - C1) / D);
    L.E[1] = expfac * (nu0p + (nu0 + be) * (nu0 + be) / D);
    L.E[6] = expfac * (nu0 + be);
    const double M = 1.0 + 2.0 / (2.0 - D) * (L.E[1] + L.E[6]);
    L.M = M;
    L.R = 2.0 + M * (1.5 * C2 - 0.5 * C1);
    const double R = L.R, H = L.H;

    const double dm = C2 - 3.0 * C1;  // > 0 by the geometry constraint
    const double dp = C2 + C1;

    L.E[0] = (nu0 + be) * (nu0 + be) * (C2 - C1) / D *
             (std::sqrt(8.0 / (e * (C2 - 2.0 * C1) * (C2 - 2.0 * C1))) +
              std::sqrt(8.0 / (e * (C2 + 2.0 * C1) * (C2 + 2.0 * C1))));
    L.E[2] = D * M / (4.0 * kSqrtPi) *
             (2.0 * (1.0 + be) * (1.0 + M / (be * be)) +
              3.0 * C2 * std::pow(2.0 / (3.0 * e * C2 * C2), 1.5));
    L.E31 = 9.0 * dp * dp / (32.0 * kSqrtPi) * std::pow(40.0 / (e * dm * dm), 2.5) +
            1.0 / (4.0 * kSqrtPi) * std::pow(24.0 / (e * dm * dm), 1.5);
    L.E32 = 9.0 * dp * dp / (32.0 * kSqrtPi) * std::pow(40.0 / (e * dp * dp), 2.5) +
            1.0 / (4.0 * kSqrtPi) * std::pow(24.0 / (e * dp * dp), 1.5);
    L.E[3] = M * (L.E31 + L.E32);
    const double bracket34 =
        std::pow(24.0 / (e * dm * dm), 1.5) + std::pow(24.0 / (e * dp * dp), 1.5);
    L.E[4] = 3.0 * M * be * dp / (8.0 * kSqrtPi) * bracket34;
    L.E[5] = 3.0 * R * ng * be * dp / (8.0 * kSqrtPi) * bracket34;
    L.E[7] = 2.0 * D * M / kSqrtPi;
    L.E[8] = D * M / (4.0 * kSqrtPi) *
             (2.0 * (be + D * ng + M / H) +
              3.0 * C1 * std::pow(2.0 / (3.0 * e * C1 * C1), 1.5));
    L.E[9] = 2.0 * be * M / kSqrtPi;
    L.E[10] = 2.0 * be * R * ng / kSqrtPi;

    L.F[0] = 3.0 * D * dp * (be + 1.0) / (8.0 * kSqrtPi * be * be) *
             (std::pow(24.0 / (e * (C2 - 2.0 * C1) * (C2 - 2.0 * C1)), 1.5) +
              std::pow(24.0 / (e * (C2 + 2.0 * C1) * (C2 + 2.0 * C1)), 1.5));
    L.F[1] = 2.0 / kSqrtPi * L.E[1];
    L.F[2] = D / (4.0 * kSqrtPi) *
                 (2.0 * (1.0 + be) * (1.0 + M / (be * be)) +
                  3.0 * C2 * std::pow(2.0 / (3.0 * e * C2 * C2), 1.5)) +
             1.0 / (std::sqrt(D) * kSqrtPi) *
                 (D * (be + 1.0) / (be * be) +
                  2.0 * (be + 1.0) * (be + 1.0) / (be * be) *
                      std::pow(1.0 + D * M / (be * be), 2)) +
             std::pow(6.0 / (e * C2 * C2), 1.5) * (18.0 * C2 * C2 + 1.0) /
                 (4.0 * kSqrtPi) * 2.0 * D * (be + 1.0) / (be * be);
    const double e32 = std::pow(e, 1.5);
    const double sqrt6 = std::sqrt(6.0), sqrt3 = std::sqrt(3.0);
    const double threeC2mC1 = 3.0 * C2 - C1;
    L.F31 = 1.0 / (kSqrtPi * e32) *
            (sqrt6 * threeC2mC1 * threeC2mC1 / (16.0 * dm * dm * dm) +
             27.0 * sqrt3 / 4.0 + 12.0 * sqrt6 / (dm * dm * dm) +
             6.0 * sqrt3 / (dp * dp * dp));
    L.F32 = 12.0 * sqrt6 / (kSqrtPi * e32) *
            (1.0 / (dm * dm * dm) + 9.0 / 8.0 +
             threeC2mC1 * threeC2mC1 / (8.0 * dm * dm * dm) + 1.0 / (dp * dp));
    L.F[3] = M * be * (L.F31 + L.F32);
    L.F[4] = be * R * ng * (L.F31 + L.F32);
    L.F51 = sqrt6 / std::sqrt(M_PI * e) * (1.0 / (dm * dm) + 1.0 / (dp * dp));
    L.F[5] = M * (L.F31 + L.F32) + L.F51;
    L.F[6] = 2.0 / (D * kSqrtPi) * expfac * (nu0 + be);
    L.F[7] = be * M * std::pow(6.0, 1.5) * D / (kSqrtPi * e32) *
             (threeC2mC1 / (dm * dm * dm) + 3.0 / (dp * dp));
    L.F[8] = std::sqrt(D) / (4.0 * kSqrtPi) *
             (6.0 * M + 3.0 / (C1 * C1) * std::pow(2.0 / (3.0 * e), 1.5) +
              6.0 * M / (C1 * C1) * std::pow(6.0 / e, 1.5));
    L.F[9] = D / (4.0 * kSqrtPi) *
                 (2.0 * (1.0 + be) * (1.0 + M / (be * be)) +
                  3.0 * C1 * std::pow(2.0 / (3.0 * e * C1 * C1), 1.5)) +
             1.0 / (std::sqrt(D) * kSqrtPi) *
                 (1.0 / H + 2.0 / H * std::pow(be + D * ng + M / H, 2)) +
             std::pow(6.0 / (e * C1 * C1), 1.5) * (18.0 * C1 * C1 + 1.0) /
                 (4.0 * kSqrtPi) / H;
    L.F[10] = be * R * ng *
              (std::pow(be + D * ng + M / H, 2) / std::sqrt(M_PI * D) +
               std::pow(6.0 / e, 1.5) / (C1 * C1 * kSqrtPi));

    for (double v : L.E)
        if (!std::isfinite(v)) throw DegenerateGeometryError("compute_constants: non-finite growth constant");
    for (double v : L.F)
        if (!std::isfinite(v)) throw DegenerateGeometryError("compute_constants: non-finite Lipschitz constant");

    const double sumE = L.E[0] + L.E[2] + L.E[3] + L.E[4] + L.E[5] + L.E[7] + L.E[8] +
                        L.E[9] + L.E[10];
    double sumF = 0.0;
    for (double v : L.F) sumF += v;

    const double drive = be + D * ng + M / H;
    L.bounds = {
        {"sigma <= 1/M", 1.0 / M},
        {"2(1+beta)(1+DM/beta^2) sigma <= C2",
         C2 / (2.0 * (1.0 + be) * (1.0 + D * M / (be * be)))},
        {"2(beta+D|g|+M/H) sigma <= C1", C1 / (2.0 * drive)},
        {"(M/(HD))(beta+D|g|+M/H) sigma <= 1", H * D / (M * drive)},
        {"(2M(beta+1)/beta^2)(1+DM/beta^2) sigma <= 1",
         be * be / (2.0 * M * (be + 1.0) * (1.0 + D * M / (be * be)))},
        {"growth-sum sqrt(sigma) bound", std::pow((2.0 - D) / (2.0 * sumE), 2)},
        {"lipschitz-sum sqrt(sigma) bound", std::pow((2.0 - D) / (2.0 * sumF), 2)},
    };
    L.sigma_star = L.bounds[0].bound;
    for (const auto& b : L.bounds) L.sigma_star = std::min(L.sigma_star, b.bound);
    if (!(L.sigma_star > 0.0) || !std::isfinite(L.sigma_star))
        throw DegenerateGeometryError("compute_constants: empty admissible horizon");
    return L;
}

// ---------------------------------------------------------------------------
// Boundary evaluation
// ---------------------------------------------------------------------------

BoundaryEval::BoundaryEval(const VectorXd& chi1, const VectorXd& chi2,
                           const VectorXd& w0_nodes, const FluxSpec& g,
                           const TimeGrid& grid, double C1, double C2, double D,
                           double beta)
    : grid_(grid), w0_nodes_(w0_nodes), C1_(C1), C2_(C2), D_(D), beta_(beta) {
    if (chi1.size() != grid.N || chi2.size() != grid.N || w0_nodes.size() != grid.N + 1)
        throw InvalidInputError("BoundaryEval: sample/grid size mismatch");
    chi1_cells_ = chi1;
    chi2_over_w0_cells_.resize(grid.N);
    g_cells_.resize(grid.N);
    for (int j = 0; j < grid.N; ++j) {
        const double w0m = 0.5 * (w0_nodes[j] + w0_nodes[j + 1]);
        if (!(w0m > 0.0)) throw InvalidInputError("BoundaryEval: w0 must stay positive");
        chi2_over_w0_cells_[j] = chi2[j] / w0m;
        g_cells_[j] = g(grid.midpoint(j));
    }
    const double h = grid.h();
    auto cum = [h](const VectorXd& cells) {
        VectorXd out(cells.size() + 1);
        out[0] = 0.0;
        for (Eigen::Index j = 0; j < cells.size(); ++j) out[j + 1] = out[j] + h * cells[j];
        return out;
    };
    chi1_cum_ = cum(chi1_cells_);
    chi2_over_w0_cum_ = cum(chi2_over_w0_cells_);
    g_cum_ = cum(g_cells_);
}

double BoundaryEval::prefix(const VectorXd& cells, const VectorXd& node_cum,
                            double t) const {
    if (t <= 0.0) return 0.0;
    const double h = grid_.h();
    int j = int(t / h);
    if (j >= grid_.N) j = grid_.N - 1;
    return node_cum[j] + (t - grid_.node(j)) * cells[j];
}

double BoundaryEval::cum_chi1(double t) const { return prefix(chi1_cells_, chi1_cum_, t); }

double BoundaryEval::y0(double t) const {
    return C1_ - beta_ * t - prefix(g_cells_, g_cum_, t) +
           prefix(chi2_over_w0_cells_, chi2_over_w0_cum_, t);
}

double BoundaryEval::y1(double t) const {
    const double arg = 1.0 - cum_chi1(t);
    if (!(arg > 0.0))
        throw HorizonExceededError("free boundary: log argument nonpositive, reduce sigma");
    return C2_ + (1.0 - beta_) * t + D_ * (beta_ + 1.0) / (beta_ * beta_) * std::log(arg);
}

double BoundaryEval::w0_at(double t) const {
    const double h = grid_.h();
    if (t <= 0.0) return w0_nodes_[0];
    if (t >= grid_.sigma) return w0_nodes_[grid_.N];
    const int j = std::min(int(t / h), grid_.N - 1);
    const double w = (t - grid_.node(j)) / h;
    return (1.0 - w) * w0_nodes_[j] + w * w0_nodes_[j + 1];
}

std::pair<VectorXd, VectorXd> free_boundaries(const VectorXd& chi1, const VectorXd& chi2,
                                              const VectorXd& w0_nodes, const FluxSpec& g,
                                              const TimeGrid& grid,
                                              const TransformedProblem& tp,
                                              const PhysicalProblem& p) {
    const BoundaryEval be(chi1, chi2, w0_nodes, g, grid, tp.C1, tp.C2, p.D, p.beta);
    VectorXd y0(grid.N + 1), y1(grid.N + 1);
    for (int j = 0; j <= grid.N; ++j) {
        y0[j] = be.y0(grid.node(j));
        y1[j] = be.y1(grid.node(j));
    }
    return {y0, y1};
}

// ---------------------------------------------------------------------------
// The integral-system map
// ---------------------------------------------------------------------------

namespace {

// Density g(tau) w0(tau) sampled at cell midpoints.
VectorXd flux_w0_cells(const BoundaryEval& be, const FluxSpec& g, const TimeGrid& grid) {
    VectorXd out(grid.N);
    for (int j = 0; j < grid.N; ++j) {
        const double tm = grid.midpoint(j);
        out[j] = g(tm) * be.w0_at(tm);
    }
    return out;
}

}  // namespace

std::pair<VectorXd, VectorXd> apply_psi(const VectorXd& chi1, const VectorXd& chi2,
                                        const VectorXd& w0_nodes,
                                        const TransformedProblem& tp,
                                        const PhysicalProblem& p, const TimeGrid& grid) {
    const double D = p.D, beta = p.beta;
    const double C1 = tp.C1, C2 = tp.C2;
    const double jump = 2.0 / (2.0 - D);
    const BoundaryEval be(chi1, chi2, w0_nodes, p.g, grid, C1, C2, D, beta);
    const VectorXd gw0 = flux_w0_cells(be, p.g, grid);

    VectorXd out1(grid.N), out2(grid.N);
    for (int i = 0; i < grid.N; ++i) {
        const double t = grid.midpoint(i);
        const double y1t = be.y1(t);
        const double y0t = be.y0(t);

        // --- upper-boundary equation ---
        const double corner =
            eval_image_kernel(ImageKind::Green, KernelDeriv::none, {y1t, t, C1, 0.0, D}) *
            tp.F(C1);
        const double spaceG = integrate_gaussian(tp.Fprime, C1, C2, y1t, t, D) -
                              integrate_gaussian(tp.Fprime, C1, C2, -y1t, t, D);
        const auto Ny_y1y1 = [&](double tt, double tau) {
            return eval_image_kernel(ImageKind::Neumann, KernelDeriv::d_x,
                                     {y1t, tt, be.y1(tau), tau, D});
        };
        const auto Gtau_y1y0 = [&](double tt, double tau) {
            return eval_image_kernel(ImageKind::Green, KernelDeriv::d_tau,
                                     {y1t, tt, be.y0(tau), tau, D});
        };
        const auto Ny_y1y0 = [&](double tt, double tau) {
            return eval_image_kernel(ImageKind::Neumann, KernelDeriv::d_x,
                                     {y1t, tt, be.y0(tau), tau, D});
        };
        out1[i] = jump * (corner + spaceG +
                          D * integrate_singular_history(chi1, grid, t, Ny_y1y1) +
                          integrate_singular_history(chi2, grid, t, Gtau_y1y0) +
                          beta * integrate_singular_history(chi2, grid, t, Ny_y1y0) -
                          beta * integrate_singular_history(gw0, grid, t, Ny_y1y0));

        // --- lower-boundary equation ---
        const double spaceN = integrate_gaussian(tp.F, C1, C2, y0t, t, D) +
                              integrate_gaussian(tp.F, C1, C2, -y0t, t, D);
        const auto N_y0y1 = [&](double tt, double tau) {
            return eval_image_kernel(ImageKind::Neumann, KernelDeriv::none,
                                     {y0t, tt, be.y1(tau), tau, D});
        };
        const auto Gy_y0y0 = [&](double tt, double tau) {
            return eval_image_kernel(ImageKind::Green, KernelDeriv::d_x,
                                     {y0t, tt, be.y0(tau), tau, D});
        };
        const auto N_y0y0 = [&](double tt, double tau) {
            return eval_image_kernel(ImageKind::Neumann, KernelDeriv::none,
                                     {y0t, tt, be.y0(tau), tau, D});
        };
        out2[i] = jump * (spaceN + D * integrate_singular_history(chi1, grid, t, N_y0y1) -
                          D * integrate_singular_history(chi2, grid, t, Gy_y0y0) +
                          beta * integrate_singular_history(chi2, grid, t, N_y0y0) -
                          beta * integrate_singular_history(gw0, grid, t, N_y0y0));
    }
    return {out1, out2};
}

// ---------------------------------------------------------------------------
// Inner Picard iteration
// ---------------------------------------------------------------------------

DensityState inner_solve(const VectorXd& w0_nodes, const TransformedProblem& tp,
                         const PhysicalProblem& p, const TimeGrid& grid, double tol,
                         int max_iter) {
    DensityState st;
    st.grid = grid;
    st.w0 = w0_nodes;
    st.chi1 = VectorXd::Zero(grid.N);
    st.chi2 = VectorXd::Zero(grid.N);

    double prev_delta = -1.0;
    for (int k = 0; k < max_iter; ++k) {
        auto [n1, n2] = apply_psi(st.chi1, st.chi2, w0_nodes, tp, p, grid);
        const double delta = sup(n1 - st.chi1) + sup(n2 - st.chi2);
        if (prev_delta > 0.0) st.contraction_ratios.push_back(delta / prev_delta);
        st.chi1 = n1;
        st.chi2 = n2;
        st.inner_iterations = k + 1;
        if (delta <= tol) {
            auto [y0n, y1n] = free_boundaries(st.chi1, st.chi2, w0_nodes, p.g, grid, tp, p);
            st.y0 = y0n;
            st.y1 = y1n;
            st.C_of_t.resize(grid.N + 1);
            const BoundaryEval be(st.chi1, st.chi2, w0_nodes, p.g, grid, tp.C1, tp.C2,
                                  p.D, p.beta);
            for (int j = 0; j <= grid.N; ++j) st.C_of_t[j] = be.C(grid.node(j));
            return st;
        }
        prev_delta = delta;
    }
    throw NoConvergenceError("inner_solve: Picard iteration did not converge",
                             st.contraction_ratios);
}

// ---------------------------------------------------------------------------
// Field reconstruction and the outer fixed point
// ---------------------------------------------------------------------------

double reconstruct_w(const DensityState& state, const TransformedProblem& tp,
                     const PhysicalProblem& p, double y, double t) {
    const double D = p.D, beta = p.beta;
    if (t <= 0.0) {
        if (y < tp.C1 - 1e-9 || y > tp.C2 + 1e-9)
            throw OutOfDomainError("reconstruct_w: y outside [C1, C2] at t = 0");
        return tp.F(y);
    }
    const BoundaryEval be(state.chi1, state.chi2, state.w0, p.g, state.grid, tp.C1, tp.C2,
                          D, beta);
    const double y0t = be.y0(t), y1t = be.y1(t);
    const double slack = 1e-9 * (tp.C2 - tp.C1);
    if (y < y0t - slack || y > y1t + slack)
        throw OutOfDomainError("reconstruct_w: y outside [y0(t), y1(t)]");

    const VectorXd gw0 = flux_w0_cells(be, p.g, state.grid);

    const double space = integrate_gaussian(tp.F, tp.C1, tp.C2, y, t, D) +
                         integrate_gaussian(tp.F, tp.C1, tp.C2, -y, t, D);
    const auto N_y1 = [&](double tt, double tau) {
        return eval_image_kernel(ImageKind::Neumann, KernelDeriv::none,
                                 {y, tt, be.y1(tau), tau, D});
    };
    const auto Nxi_y0 = [&](double tt, double tau) {
        return eval_image_kernel(ImageKind::Neumann, KernelDeriv::d_xi,
                                 {y, tt, be.y0(tau), tau, D});
    };
    const auto N_y0 = [&](double tt, double tau) {
        return eval_image_kernel(ImageKind::Neumann, KernelDeriv::none,
                                 {y, tt, be.y0(tau), tau, D});
    };
    return space + D * integrate_singular_history(state.chi1, state.grid, t, N_y1) +
           D * integrate_singular_history(state.chi2, state.grid, t, Nxi_y0) +
           beta * integrate_singular_history(state.chi2, state.grid, t, N_y0) -
           beta * integrate_singular_history(gw0, state.grid, t, N_y0);
}

VectorXd phi_update(const DensityState& state, const TransformedProblem& tp,
                    const PhysicalProblem& p, int Ny) {
    const TimeGrid& grid = state.grid;
    VectorXd out(grid.N + 1);
    out[0] = 1.0 + integrate_space(tp.F.abscissae(), tp.F.values()) / p.D;
    for (int m = 1; m <= grid.N; ++m) {
        const double t = grid.node(m);
        const VectorXd ys = linspace(state.y0[m], state.y1[m], Ny);
        VectorXd ws(Ny);
        for (int k = 0; k < Ny; ++k) ws[k] = reconstruct_w(state, tp, p, ys[k], t);
        out[m] = state.C_of_t[m] + integrate_space(ys, ws) / p.D;
    }
    return out;
}

DensityState outer_solve(const TransformedProblem& tp, const PhysicalProblem& p,
                         const TimeGrid& grid, double tol_outer, double relax,
                         int max_outer, int Ny, double tol_inner) {
    double R = std::numeric_limits<double>::infinity();
    try {
        R = compute_constants(tp, p).R;
    } catch (const SolverError&) {
        // no ledger for this geometry; clamp only from below
    }

    VectorXd w0 = VectorXd::Ones(grid.N + 1);
    std::vector<double> diffs;
    for (int k = 0; k < max_outer; ++k) {
        DensityState st = inner_solve(w0, tp, p, grid, tol_inner);
        const VectorXd w0p = phi_update(st, tp, p, Ny);
        const double diff = sup(w0p - w0);
        diffs.push_back(diff);
        VectorXd next = (1.0 - relax) * w0 + relax * w0p;
        for (int j = 0; j <= grid.N; ++j) next[j] = std::clamp(next[j], 1.0, R);
        if (diff <= tol_outer) {
            st.outer_iterations = k + 1;
            return st;
        }
        w0 = next;
    }
    throw NoConvergenceError(
        "outer_solve: fixed point on w0 did not converge; reduce sigma or relax", diffs);
}

// ---------------------------------------------------------------------------
// Time extension
// ---------------------------------------------------------------------------

namespace {

// Restart data from the trace at the end of a converged segment: pull the
// transformed datum back through the inverse Hopf-Cole relation, then rebuild
// the trace on the shifted interval.
std::pair<TransformedProblem, PhysicalProblem> restart_from(const DensityState& state,
                                                            const TransformedProblem& tp,
                                                            const PhysicalProblem& p) {
    const int N = state.grid.N;
    const double sigma = state.grid.sigma;
    const double ylo = state.y0[N], yhi = state.y1[N];
    const double Ct = state.C_of_t[N];

    const int n = int(tp.V0.size());
    const VectorXd ys = linspace(ylo, yhi, n);
    VectorXd ws(n);
    for (int k = 0; k < n; ++k) ws[k] = reconstruct_w(state, tp, p, ys[k], sigma);

    // tail[k] = int_{ys[k]}^{yhi} w
    VectorXd tail(n);
    tail[n - 1] = 0.0;
    for (int k = n - 2; k >= 0; --k)
        tail[k] = tail[k + 1] + 0.5 * (ws[k] + ws[k + 1]) * (ys[k + 1] - ys[k]);

    VectorXd v0(n);
    for (int k = 0; k < n; ++k) {
        const double denom = Ct + tail[k] / p.D;
        if (!(denom > 0.0))
            throw InversionSingularityError("extend: nonpositive transform denominator");
        v0[k] = ws[k] / denom;
    }

    FluxSpec g_next = p.g.shifted(sigma);
    TransformedProblem tp_next =
        make_transformed_from_V0(p.D, p.beta, Tabulated(ys, v0), g_next.sup_norm(1.0));

    // Physical profile at the restart: x from the stretch inverse, u = V + beta.
    VectorXd xs(n), us(n);
    xs[0] = 0.0;
    us[0] = v0[0] + p.beta;
    for (int k = 1; k < n; ++k) {
        us[k] = v0[k] + p.beta;
        xs[k] = xs[k - 1] + 0.5 * (us[k - 1] + us[k]) * (ys[k] - ys[k - 1]);
    }
    PhysicalProblem p_next{p.D, p.beta, xs[n - 1], g_next, Tabulated(xs, us)};
    return {tp_next, p_next};
}

}  // namespace

SegmentChain extend_solution(const TransformedProblem& tp, const PhysicalProblem& p,
                             double T, int N, double tol_outer, int Ny,
                             int max_segments) {
    if (!(T > 0.0)) throw InvalidInputError("extend_solution: horizon must be positive");
    SegmentChain chain;
    TransformedProblem cur_tp = tp;
    PhysicalProblem cur_p = p;
    double acc = 0.0;

    for (int seg = 0; seg < max_segments; ++seg) {
        Segment s;
        s.t_offset = acc;
        s.tp = cur_tp;
        s.p = cur_p;
        try {
            s.ledger = compute_constants(cur_tp, cur_p);
            const double sigma = std::min(s.ledger.sigma_star, T - acc);
            s.state = outer_solve(cur_tp, cur_p, TimeGrid(sigma, N), tol_outer, 1.0,
                                  50, Ny);
        } catch (const SolverError& err) {
            throw PartialResultError(std::string("extend_solution: segment failed: ") +
                                         err.what(),
                                     std::move(chain));
        }
        acc += s.state.grid.sigma;
        chain.segments.push_back(std::move(s));
        chain.total_horizon = acc;
        if (acc >= T * (1.0 - 1e-12)) return chain;
        const Segment& done = chain.segments.back();
        try {
            std::tie(cur_tp, cur_p) = restart_from(done.state, done.tp, done.p);
        } catch (const SolverError& err) {
            throw PartialResultError(std::string("extend_solution: restart failed: ") +
                                         err.what(),
                                     std::move(chain));
        }
    }
    throw PartialResultError("extend_solution: segment budget exhausted before horizon",
                             std::move(chain));
}

}  // namespace fbns
