#pragma once

#include "fbns/common.hpp"

namespace fbns {

// Heat kernel on the line and its half-plane images, with the analytic
// derivatives needed by the boundary integral system.  All functions are
// stateless and thread-safe.

struct KernelQuery {
    double x;    // evaluation point
    double t;    // evaluation time
    double xi;   // source point
    double tau;  // source time
    double D;    // diffusivity, > 0
};

enum class ImageKind { Green, Neumann };

enum class KernelDeriv { none, d_x, d_xi, d_tau, d_xx };

/// Fundamental solution of u_t = D u_xx; identically zero for t <= tau.
double eval_K(const KernelQuery& q);

/// Half-plane Green (odd image) or Neumann (even image) kernel, or one of its
/// partial derivatives: d_x / d_xx differentiate the first spatial argument,
/// d_xi the source point, d_tau the source time.
double eval_image_kernel(ImageKind kind, KernelDeriv deriv, const KernelQuery& q);

}  // namespace fbns
