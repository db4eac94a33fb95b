#pragma once

#include "fbns/common.hpp"

#include <functional>

namespace fbns {

/// Uniform grid on [0, sigma] with nodes t_j = j h and cell midpoints.
struct TimeGrid {
    double sigma = 0.0;
    int N = 0;

    TimeGrid() = default;
    TimeGrid(double sigma_, int N_) : sigma(sigma_), N(N_) {
        if (!(sigma > 0.0)) throw InvalidInputError("TimeGrid: sigma must be positive");
        if (N < 8) throw InvalidInputError("TimeGrid: N must be >= 8");
    }

    double h() const { return sigma / N; }
    double node(int j) const { return sigma * j / N; }
    double midpoint(int j) const { return sigma * (j + 0.5) / N; }
};

/// Composite Simpson over sampled abscissae (uniform); falls back to a
/// trapezoid tail when the sample count is even.
double integrate_space(const VectorXd& abscissae, const VectorXd& values);

/// Product-integration rule for integrals of the form
///   int_0^t chi(tau) k(t, tau) dtau
/// where k carries a (t - tau)^{-1/2} factor.  chi is sampled at the cell
/// midpoints of `grid` and extended as piecewise constant; the singular
/// weight int (t-tau)^{-1/2} dtau is computed analytically per cell so the
/// rule is exact when chi(tau) k(t,tau) sqrt(t-tau) is constant.
/// `t` may be any point in [0, sigma], not only a node.
double integrate_singular_history(const VectorXd& chi_midpoints, const TimeGrid& grid,
                                  double t,
                                  const std::function<double(double, double)>& kernel);

/// Integral over [a, b] of f(xi) against a Gaussian
///   exp(-(xi - center)^2 / (4 D s)) / (2 sqrt(pi D s)),
/// evaluated in the similarity variable so that sharply peaked kernels
/// (small s) are resolved independently of how f is tabulated.
double integrate_gaussian(const std::function<double(double)>& f, double a, double b,
                          double center, double s, double D);

/// Exact variant for piecewise-linear integrands: each table cell contributes
/// its closed-form Gaussian moment, so the result carries no quadrature error
/// at any bandwidth.
double integrate_gaussian(const Tabulated& f, double a, double b, double center,
                          double s, double D);

}  // namespace fbns
