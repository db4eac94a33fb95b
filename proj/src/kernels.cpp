#include "fbns/kernels.hpp"

#include <cmath>

namespace fbns {

namespace {

constexpr double kUnderflowExponent = -700.0;

void check_query(const KernelQuery& q) {
    if (!(q.D > 0.0)) throw InvalidInputError("kernel: D must be positive");
    if (!std::isfinite(q.x) || !std::isfinite(q.t) || !std::isfinite(q.xi) ||
        !std::isfinite(q.tau) || !std::isfinite(q.D))
        throw InvalidInputError("kernel: non-finite input");
}

// K and its partials as functions of (r, s) = (x - xi, t - tau), s > 0.
double base(double r, double s, double D) {
    const double e = -r * r / (4.0 * D * s);
    if (e < kUnderflowExponent) return 0.0;
    return std::exp(e) / (2.0 * std::sqrt(M_PI * D * s));
}

double deriv_of_K(KernelDeriv deriv, double r, double s, double D) {
    const double k = base(r, s, D);
    switch (deriv) {
        case KernelDeriv::none:
            return k;
        case KernelDeriv::d_x:
            return -r / (2.0 * D * s) * k;
        case KernelDeriv::d_xi:
            return r / (2.0 * D * s) * k;
        case KernelDeriv::d_tau:
            // K depends on t - tau only, so d/dtau = -d/dt.
            return (0.5 / s - r * r / (4.0 * D * s * s)) * k;
        case KernelDeriv::d_xx:
            return (r * r / (4.0 * D * D * s * s) - 0.5 / (D * s)) * k;
    }
    throw UnsupportedOperationError("kernel: unknown derivative selector");
}

}  // namespace

double eval_K(const KernelQuery& q) {
    check_query(q);
    if (q.t <= q.tau) return 0.0;
    return base(q.x - q.xi, q.t - q.tau, q.D);
}

double eval_image_kernel(ImageKind kind, KernelDeriv deriv, const KernelQuery& q) {
    check_query(q);
    if (q.t <= q.tau) return 0.0;
    const double s = q.t - q.tau;
    const double direct = deriv_of_K(deriv, q.x - q.xi, s, q.D);
    // Image term K(-x, t; xi, tau): differentiating in x flips the sign of
    // first-argument derivatives of odd order.
    double image = deriv_of_K(deriv, -q.x - q.xi, s, q.D);
    if (deriv == KernelDeriv::d_x) image = -image;
    switch (kind) {
        case ImageKind::Green:
            return direct - image;
        case ImageKind::Neumann:
            return direct + image;
    }
    throw UnsupportedOperationError("kernel: unknown image kind");
}

}  // namespace fbns
