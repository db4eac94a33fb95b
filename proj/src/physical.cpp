#include "fbns/physical.hpp"

#include <algorithm>
#include <cmath>

namespace fbns {

namespace {

double interp(const VectorXd& xs, const VectorXd& vs, double xq) {
    const Eigen::Index n = xs.size();
    if (xq <= xs[0]) return vs[0];
    if (xq >= xs[n - 1]) return vs[n - 1];
    Eigen::Index lo = 0, hi = n - 2;
    while (lo < hi) {
        const Eigen::Index mid = (lo + hi + 1) / 2;
        if (xs[mid] <= xq) lo = mid; else hi = mid - 1;
    }
    const double w = (xq - xs[lo]) / (xs[lo + 1] - xs[lo]);
    return (1.0 - w) * vs[lo] + w * vs[lo + 1];
}

// Derivative of the quadratic through three (x, v) points, at xq.
double quad_deriv(double x0, double v0, double x1, double v1, double x2, double v2,
                  double xq) {
    const double d0 = v0 * (2.0 * xq - x1 - x2) / ((x0 - x1) * (x0 - x2));
    const double d1 = v1 * (2.0 * xq - x0 - x2) / ((x1 - x0) * (x1 - x2));
    const double d2 = v2 * (2.0 * xq - x0 - x1) / ((x2 - x0) * (x2 - x1));
    return d0 + d1 + d2;
}

// Second derivative of the same quadratic (constant in xq).
double quad_second(double x0, double v0, double x1, double v1, double x2, double v2) {
    return 2.0 * (v0 / ((x0 - x1) * (x0 - x2)) + v1 / ((x1 - x0) * (x1 - x2)) +
                  v2 / ((x2 - x0) * (x2 - x1)));
}

// Slice derivatives at xq via a local quadratic fit around the nearest sample.
void slice_derivs(const VectorXd& xs, const VectorXd& vs, double xq, double* d1,
                  double* d2) {
    const Eigen::Index n = xs.size();
    Eigen::Index j = 0;
    while (j + 1 < n && xs[j + 1] < xq) ++j;
    Eigen::Index c = std::clamp<Eigen::Index>(j, 1, n - 2);
    if (d1) *d1 = quad_deriv(xs[c - 1], vs[c - 1], xs[c], vs[c], xs[c + 1], vs[c + 1], xq);
    if (d2) *d2 = quad_second(xs[c - 1], vs[c - 1], xs[c], vs[c], xs[c + 1], vs[c + 1]);
}

}  // namespace

double PhysicalSolution::u_at(Eigen::Index k, double xq) const {
    return interp(x[k], u[k], xq);
}

double PhysicalSolution::s_at(double t) const { return interp(times, s, t); }

SliceInversion invert_state(const DensityState& state, const TransformedProblem& tp,
                            const PhysicalProblem& p, double t, int Ny) {
    if (Ny < 5) throw InvalidInputError("invert_state: Ny too small");
    double ylo, yhi, Ct;
    if (t <= 0.0) {
        ylo = tp.C1;
        yhi = tp.C2;
        Ct = 1.0;
    } else {
        const BoundaryEval be(state.chi1, state.chi2, state.w0, p.g, state.grid, tp.C1,
                              tp.C2, p.D, p.beta);
        ylo = be.y0(t);
        yhi = be.y1(t);
        Ct = be.C(t);
    }

    // Uniform backbone plus geometric clustering into both ends: the field
    // develops diffusive boundary layers of width sqrt(D t) that a uniform
    // mesh cannot see at short horizons.
    std::vector<double> pts;
    const double L = yhi - ylo;
    // The interior backbone lives on trace-table cell midpoints: the evolved
    // field carries short-lived bumps at the table knots (heat smoothing of
    // the interpolant kinks), so sampling at knots would alias them into the
    // slice integrals.  Anchoring the mesh to the table also keeps it
    // identical across nearby time slices.
    const VectorXd& fx = tp.F.abscissae();
    const Eigen::Index ncell = fx.size() - 1;
    const Eigen::Index stride = std::max<Eigen::Index>(1, ncell / (Ny - 1));
    pts.push_back(ylo);
    for (Eigen::Index i = 0; i < ncell; i += stride) {
        const double mid = 0.5 * (fx[i] + fx[i + 1]);
        if (mid > ylo && mid < yhi) pts.push_back(mid);
    }
    pts.push_back(yhi);
    // The grading stops at the resolving scale of the time discretization:
    // below sqrt(D h) the discrete boundary potentials cannot develop their
    // full jump and the reconstruction is not trustworthy.
    const double floor_d =
        std::max(1e-11 * L, 2.0 * std::sqrt(p.D * state.grid.h()));
    for (double d = 0.25 * L / (Ny - 1); d > floor_d; d *= 0.35) {
        pts.push_back(ylo + d);
        pts.push_back(yhi - d);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [L](double a, double b) { return b - a < 1e-13 * L; }),
              pts.end());
    const int n = int(pts.size());
    const VectorXd ys = Eigen::Map<VectorXd>(pts.data(), n);

    VectorXd ws(n);
    for (int k = 0; k < n; ++k) ws[k] = reconstruct_w(state, tp, p, ys[k], t);

    VectorXd tail(n);
    tail[n - 1] = 0.0;
    for (int k = n - 2; k >= 0; --k)
        tail[k] = tail[k + 1] + 0.5 * (ws[k] + ws[k + 1]) * (ys[k + 1] - ys[k]);

    SliceInversion out;
    out.x.resize(n);
    out.u.resize(n);
    VectorXd v(n);
    for (int k = 0; k < n; ++k) {
        const double denom = Ct + tail[k] / p.D;
        if (!(denom > 0.0))
            throw InversionSingularityError("invert_state: nonpositive transform denominator");
        v[k] = ws[k] / denom + p.beta;
        out.u[k] = v[k];
    }
    out.x[0] = 0.0;
    for (int k = 1; k < n; ++k)
        out.x[k] = out.x[k - 1] + 0.5 * (v[k - 1] + v[k]) * (ys[k] - ys[k - 1]);
    out.s = out.x[n - 1];
    return out;
}

PhysicalSolution invert_segment(const DensityState& state, const TransformedProblem& tp,
                                const PhysicalProblem& p, int Ny, double t_offset,
                                int from_node) {
    const int N = state.grid.N;
    const int count = N + 1 - from_node;
    PhysicalSolution sol;
    sol.times.resize(count);
    sol.s.resize(count);
    sol.x.resize(count);
    sol.u.resize(count);
    for (int m = from_node; m <= N; ++m) {
        const SliceInversion si = invert_state(state, tp, p, state.grid.node(m), Ny);
        const int k = m - from_node;
        sol.times[k] = t_offset + state.grid.node(m);
        sol.x[k] = si.x;
        sol.u[k] = si.u;
        sol.s[k] = si.s;
    }
    return sol;
}

PhysicalSolution invert_chain(const SegmentChain& chain, int Ny) {
    PhysicalSolution sol;
    std::vector<double> times, fronts;
    double prev_end_s = 0.0;
    for (size_t i = 0; i < chain.segments.size(); ++i) {
        const Segment& seg = chain.segments[i];
        PhysicalSolution part =
            invert_segment(seg.state, seg.tp, seg.p, Ny, seg.t_offset, i == 0 ? 0 : 1);
        if (i > 0) {
            // The heat-frame boundary curves hand over exactly between
            // segments, but each segment carries its own x-map quadrature
            // offset.  Rescale so the front is continuous at the join.
            const double s_join = invert_state(seg.state, seg.tp, seg.p, 0.0, Ny).s;
            if (s_join > 0.0 && prev_end_s > 0.0) {
                const double factor = prev_end_s / s_join;
                for (Eigen::Index k = 0; k < part.slices(); ++k) {
                    part.x[k] *= factor;
                    part.s[k] *= factor;
                }
            }
        }
        if (part.slices() > 0) prev_end_s = part.s[part.slices() - 1];
        for (Eigen::Index k = 0; k < part.slices(); ++k) {
            times.push_back(part.times[k]);
            fronts.push_back(part.s[k]);
            sol.x.push_back(part.x[k]);
            sol.u.push_back(part.u[k]);
        }
    }
    sol.times = Eigen::Map<VectorXd>(times.data(), Eigen::Index(times.size()));
    sol.s = Eigen::Map<VectorXd>(fronts.data(), Eigen::Index(fronts.size()));
    return sol;
}

ResidualReport residual_report(const PhysicalSolution& sol, const DensityState& state,
                               const TransformedProblem& tp, const PhysicalProblem& p) {
    const Eigen::Index nt = sol.slices();
    if (nt < 3) throw InsufficientDataError("residual_report: need >= 3 time slices");

    ResidualReport r;

    // Interior PDE residual on probe points, centered differences in time.
    for (Eigen::Index m = 1; m + 1 < nt; ++m) {
        const double dt = sol.times[m + 1] - sol.times[m - 1];
        const double smin =
            std::min({sol.s[m - 1], sol.s[m], sol.s[m + 1]});
        const int n_probe = 17;
        for (int q = 0; q < n_probe; ++q) {
            const double xq = smin * (0.05 + 0.85 * q / (n_probe - 1));
            const double ut = (sol.u_at(m + 1, xq) - sol.u_at(m - 1, xq)) / dt;
            double ux, uxx;
            slice_derivs(sol.x[m], sol.u[m], xq, &ux, &uxx);
            const double uu = sol.u_at(m, xq);
            r.pde_sup = std::max(r.pde_sup,
                                 std::abs(ut - uu * uu * (p.D * uxx - ux)));
        }
    }

    for (Eigen::Index m = 0; m < nt; ++m) {
        const VectorXd& xs = sol.x[m];
        const VectorXd& us = sol.u[m];
        const Eigen::Index n = xs.size();

        double ux0, uxs;
        ux0 = quad_deriv(xs[0], us[0], xs[1], us[1], xs[2], us[2], xs[0]);
        uxs = quad_deriv(xs[n - 3], us[n - 3], xs[n - 2], us[n - 2], xs[n - 1], us[n - 1],
                         xs[n - 1]);

        r.neumann_sup =
            std::max(r.neumann_sup, std::abs(p.D * ux0 - p.g(sol.times[m])));
        r.dirichlet_sup = std::max(r.dirichlet_sup, std::abs(us[n - 1] - p.beta));

        double sdot;
        if (m == 0)
            sdot = (sol.s[1] - sol.s[0]) / (sol.times[1] - sol.times[0]);
        else if (m + 1 == nt)
            sdot = (sol.s[nt - 1] - sol.s[nt - 2]) / (sol.times[nt - 1] - sol.times[nt - 2]);
        else
            sdot = (sol.s[m + 1] - sol.s[m - 1]) / (sol.times[m + 1] - sol.times[m - 1]);
        r.stefan_sup =
            std::max(r.stefan_sup, std::abs(p.D * uxs - us[n - 1] + sdot));
    }

    // Heat-frame flux condition at the lower boundary, both printed variants.
    const BoundaryEval be(state.chi1, state.chi2, state.w0, p.g, state.grid, tp.C1, tp.C2,
                          p.D, p.beta);
    const int N = state.grid.N;
    for (int m = 1; m <= N; ++m) {
        const double t = state.grid.node(m);
        const double y0t = be.y0(t), y1t = be.y1(t);
        const double dlt = (y1t - y0t) / 64.0;
        const double w0v = reconstruct_w(state, tp, p, y0t, t);
        const double w1v = reconstruct_w(state, tp, p, y0t + dlt, t);
        const double w2v = reconstruct_w(state, tp, p, y0t + 2.0 * dlt, t);
        const double wy = quad_deriv(y0t, w0v, y0t + dlt, w1v, y0t + 2.0 * dlt, w2v, y0t);
        const double gt = p.g(t);
        const double w0t = be.w0_at(t);
        r.flux_bc_sup = std::max(
            r.flux_bc_sup, std::abs(p.D * wy - (gt * w0v + p.beta * gt * w0t -
                                                w0v * w0v / w0t)));
        r.flux_bc_alt_sup = std::max(
            r.flux_bc_alt_sup, std::abs(p.D * wy - gt * w0v +
                                        w0v * w0v / (p.D * w0t) - p.beta * gt * w0t));
    }
    return r;
}

}  // namespace fbns
