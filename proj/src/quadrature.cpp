#include "fbns/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace fbns {

double integrate_space(const VectorXd& abscissae, const VectorXd& values) {
    const Eigen::Index n = abscissae.size();
    if (n != values.size() || n < 3)
        throw InvalidInputError("integrate_space: need >= 3 matching samples");
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        if (!(abscissae[i] < abscissae[i + 1]))
            throw InvalidInputError("integrate_space: abscissae must be strictly increasing");

    const double h = (abscissae[n - 1] - abscissae[0]) / double(n - 1);
    bool uniform = true;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        if (std::abs((abscissae[i + 1] - abscissae[i]) - h) > 1e-9 * h) uniform = false;
    if (!uniform) {
        double s = 0.0;
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            s += 0.5 * (values[i] + values[i + 1]) * (abscissae[i + 1] - abscissae[i]);
        return s;
    }

    // Simpson over the largest odd-count prefix, trapezoid on a leftover cell.
    const Eigen::Index m = (n % 2 == 1) ? n : n - 1;
    double s = values[0] + values[m - 1];
    for (Eigen::Index i = 1; i < m - 1; i += 2) s += 4.0 * values[i];
    for (Eigen::Index i = 2; i < m - 1; i += 2) s += 2.0 * values[i];
    s *= h / 3.0;
    if (n % 2 == 0) s += 0.5 * h * (values[n - 2] + values[n - 1]);
    return s;
}

double integrate_singular_history(const VectorXd& chi_midpoints, const TimeGrid& grid,
                                  double t,
                                  const std::function<double(double, double)>& kernel) {
    if (t <= 0.0) return 0.0;
    if (chi_midpoints.size() != grid.N)
        throw InvalidInputError("integrate_singular_history: density/grid size mismatch");
    const double h = grid.h();
    double sum = 0.0;
    for (int j = 0; j < grid.N; ++j) {
        const double lo = grid.node(j);
        if (lo >= t) break;
        const double hi = std::min(grid.node(j + 1), t);
        // analytic weight of (t - tau)^{-1/2} over [lo, hi]
        const double w = 2.0 * (std::sqrt(t - lo) - std::sqrt(t - hi));
        const double tau = 0.5 * (lo + hi);
        const double psi = chi_midpoints[j] * kernel(t, tau) * std::sqrt(t - tau);
        sum += w * psi;
    }
    (void)h;
    return sum;
}

double integrate_gaussian(const std::function<double(double)>& f, double a, double b,
                          double center, double s, double D) {
    if (!(s > 0.0)) return 0.0;
    if (!(a < b)) return 0.0;
    const double w = 2.0 * std::sqrt(D * s);
    double za = (a - center) / w;
    double zb = (b - center) / w;
    za = std::max(za, -8.5);
    zb = std::min(zb, 8.5);
    if (za >= zb) return 0.0;

    constexpr int kNodes = 1025;  // odd, Simpson-ready
    const double hz = (zb - za) / (kNodes - 1);
    double sum = 0.0;
    for (int i = 0; i < kNodes; ++i) {
        const double z = za + hz * i;
        const double val = std::exp(-z * z) * f(center + w * z);
        const double coeff = (i == 0 || i == kNodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += coeff * val;
    }
    return sum * hz / 3.0 / std::sqrt(M_PI);
}

double integrate_gaussian(const Tabulated& f, double a, double b, double center,
                          double s, double D) {
    if (!(s > 0.0)) return 0.0;
    if (!(a < b)) return 0.0;
    const double w = 2.0 * std::sqrt(D * s);

    // Exact integral of a linear piece p + q xi against the Gaussian weight.
    auto seg = [&](double lo, double hi, double p, double q) {
        if (!(hi > lo)) return 0.0;
        const double z1 = (lo - center) / w;
        const double z2 = (hi - center) / w;
        if (z1 > 9.0 || z2 < -9.0) return 0.0;  // erf saturated on both ends
        const double mass = 0.5 * (std::erf(z2) - std::erf(z1));
        const double drift =
            w / (2.0 * std::sqrt(M_PI)) * (std::exp(-z1 * z1) - std::exp(-z2 * z2));
        return (p + q * center) * mass + q * drift;
    };

    const VectorXd& xs = f.abscissae();
    const VectorXd& vs = f.values();
    const Eigen::Index n = xs.size();

    double total = 0.0;
    // clamped tails outside the table support carry the end values
    total += seg(a, std::min(b, xs[0]), vs[0], 0.0);
    total += seg(std::max(a, xs[n - 1]), b, vs[n - 1], 0.0);

    // only cells inside the nine-sigma window contribute beyond roundoff
    const double wlo = std::max(a, center - 9.0 * w);
    const double whi = std::min(b, center + 9.0 * w);
    if (wlo >= whi) return total;
    const double* beg = xs.data();
    const double* end = xs.data() + n;
    Eigen::Index k0 = std::upper_bound(beg, end, wlo) - beg;
    k0 = std::max<Eigen::Index>(k0 - 1, 0);
    for (Eigen::Index k = k0; k + 1 < n && xs[k] < whi; ++k) {
        const double lo = std::max(a, xs[k]);
        const double hi = std::min(b, xs[k + 1]);
        if (hi <= lo) continue;
        const double q = (vs[k + 1] - vs[k]) / (xs[k + 1] - xs[k]);
        total += seg(lo, hi, vs[k] - q * xs[k], q);
    }
    return total;
}

}  // namespace fbns
