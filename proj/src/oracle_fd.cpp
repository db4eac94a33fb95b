#include "fbns/oracle_fd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbns {

namespace {

double lin_at(const VectorXd& xs, const VectorXd& vs, double xq) {
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

Eigen::Index nearest_time(const VectorXd& times, double t) {
    Eigen::Index best = 0;
    double d = std::abs(times[0] - t);
    for (Eigen::Index k = 1; k < times.size(); ++k) {
        const double dk = std::abs(times[k] - t);
        if (dk < d) { d = dk; best = k; }
    }
    return best;
}

}  // namespace

double FrontFixSolution::s_at(double t) const { return lin_at(times, s, t); }

double FrontFixSolution::u_at(Eigen::Index k, double x) const {
    return lin_at(xi, u[k], x / s[k]);
}

FrontFixSolution solve_frontfix(const PhysicalProblem& p, const FrontFixGrid& grid) {
    if (grid.Nx < 16) throw InvalidInputError("solve_frontfix: Nx must be >= 16");
    if (!(grid.T > 0.0)) throw InvalidInputError("solve_frontfix: horizon must be positive");
    if (!(grid.safety > 0.0 && grid.safety <= 1.0))
        throw InvalidInputError("solve_frontfix: safety must lie in (0, 1]");

    const int Nx = grid.Nx;
    const double dxi = 1.0 / Nx;
    const double D = p.D, beta = p.beta;

    VectorXd xi = linspace(0.0, 1.0, Nx + 1);
    VectorXd u(Nx + 1);
    for (int i = 0; i <= Nx; ++i) u[i] = p.u0(xi[i] * p.b);
    u[Nx] = beta;
    double s = p.b;
    double t = 0.0;

    // Sanity floor: the concentration may legitimately dip below beta at the
    // Neumann face, but a drop far below the initial range signals numerical
    // instability rather than physics.
    const double u_floor = 0.25 * std::min(u.minCoeff(), beta);

    // Store roughly uniformly in time; the step count itself is adaptive.
    const int n_store = 257;
    FrontFixSolution out;
    out.xi = xi;
    std::vector<double> st_times, st_front;
    st_times.push_back(0.0);
    st_front.push_back(s);
    out.u.push_back(u);
    int next_store = 1;

    VectorXd un(Nx + 1);
    long step = 0;
    const long max_steps = 50'000'000;
    while (t < grid.T) {
        const double umax = u.cwiseAbs().maxCoeff();
        double dt = grid.safety * dxi * dxi * s * s / (D * std::max(umax * umax, 1e-30));
        if (grid.dt > 0.0) dt = std::min(dt, grid.dt);
        dt = std::min(dt, grid.T - t);
        if (!(dt > 0.0) || ++step > max_steps) {
            std::ostringstream os;
            os << "solve_frontfix: step budget exhausted at t = " << t;
            throw BlowUpError(os.str(), t);
        }

        const double gxit = p.g(t);
        // One-sided second-order slope at the front.
        const double uxi1 = (3.0 * u[Nx] - 4.0 * u[Nx - 1] + u[Nx - 2]) / (2.0 * dxi);
        const double sdot = beta - (D / s) * uxi1;

        // Ghost node makes the central difference at xi = 0 satisfy the flux
        // condition (D/s) u_xi = g.
        const double ughost = u[1] - 2.0 * dxi * gxit * s / D;
        for (int i = 0; i <= Nx - 1; ++i) {
            const double um = (i == 0) ? ughost : u[i - 1];
            const double uxx = (u[i + 1] - 2.0 * u[i] + um) / (dxi * dxi);
            const double ux = (u[i + 1] - um) / (2.0 * dxi);
            const double rhs = u[i] * u[i] * (D / (s * s) * uxx - ux / s) +
                               xi[i] * (sdot / s) * ux;
            un[i] = u[i] + dt * rhs;
        }
        un[Nx] = beta;

        s += dt * sdot;
        t += dt;
        u = un;

        if (!(s > 0.0) || !u.allFinite()) {
            std::ostringstream os;
            os << "solve_frontfix: state blew up at t = " << t;
            throw BlowUpError(os.str(), t - dt);
        }
        if (u.minCoeff() < u_floor) {
            std::ostringstream os;
            os << "solve_frontfix: concentration fell below the stability floor at t = "
               << t;
            throw BlowUpError(os.str(), t - dt);
        }

        while (next_store < n_store && t >= grid.T * next_store / (n_store - 1) - 1e-15) {
            st_times.push_back(t);
            st_front.push_back(s);
            out.u.push_back(u);
            ++next_store;
        }
    }
    if (st_times.back() < t) {
        st_times.push_back(t);
        st_front.push_back(s);
        out.u.push_back(u);
    }
    out.times = Eigen::Map<VectorXd>(st_times.data(), Eigen::Index(st_times.size()));
    out.s = Eigen::Map<VectorXd>(st_front.data(), Eigen::Index(st_front.size()));
    return out;
}

ComparisonReport compare(const PhysicalSolution& a, const FrontFixSolution& b,
                         const VectorXd& times) {
    if (a.slices() == 0 || b.times.size() == 0 || times.size() == 0)
        throw InvalidInputError("compare: empty input");
    const double lo = std::max(a.times[0], b.times[0]);
    const double hi = std::min(a.times[a.slices() - 1], b.times[b.times.size() - 1]);
    const double slack = 1e-12 + 1e-9 * std::abs(hi);
    if (lo > hi + slack) throw InvalidInputError("compare: disjoint time ranges");

    ComparisonReport r;
    double sumsq = 0.0;
    double sb_sup = 0.0;
    int used = 0;
    for (Eigen::Index k = 0; k < times.size(); ++k) {
        const double t = times[k];
        if (t < lo - slack || t > hi + slack) continue;
        const double sa = a.s_at(t);
        const double sb = b.s_at(t);
        const double ds = std::abs(sa - sb);
        r.s_sup = std::max(r.s_sup, ds);
        sb_sup = std::max(sb_sup, std::abs(sb));
        sumsq += ds * ds;
        ++used;

        const Eigen::Index ka = nearest_time(a.times, t);
        const Eigen::Index kb = nearest_time(b.times, t);
        const double smin = std::min(a.s[ka], b.s[kb]);
        const int nxq = 33;
        for (int q = 0; q < nxq; ++q) {
            const double xq = smin * q / (nxq - 1);
            r.u_sup = std::max(r.u_sup, std::abs(a.u_at(ka, xq) - b.u_at(kb, xq)));
        }
    }
    if (used == 0) throw InvalidInputError("compare: no requested time inside the overlap");
    r.s_l2 = std::sqrt(sumsq / used);
    r.s_sup_rel = sb_sup > 0.0 ? r.s_sup / sb_sup : r.s_sup;
    return r;
}

}  // namespace fbns
