#pragma once

#include "fbns/physical.hpp"

namespace fbns {

/// Discretization of the front-fixed (xi = x / s(t)) formulation.
struct FrontFixGrid {
    int Nx = 200;         // spatial cells on [0, 1]
    double dt = 0.0;      // requested step; 0 means fully adaptive
    double T = 0.0;       // horizon
    double safety = 0.4;  // CFL factor in (0, 1]
};

struct FrontFixSolution {
    VectorXd xi;              // fixed lattice on [0, 1]
    VectorXd times;           // accepted step times (subsampled)
    std::vector<VectorXd> u;  // one profile per stored time
    VectorXd s;               // front per stored time

    double s_at(double t) const;
    /// u at physical x on stored slice k (linear in xi).
    double u_at(Eigen::Index k, double x) const;
};

/// Explicit finite-difference solve of the moving-boundary problem on the
/// front-fixed lattice.
FrontFixSolution solve_frontfix(const PhysicalProblem& p, const FrontFixGrid& grid);

struct ComparisonReport {
    double s_sup = 0.0;  // sup |s_A - s_B| over compared times
    double s_l2 = 0.0;   // discrete L2 of the same difference
    double u_sup = 0.0;  // sup over times and common x-points of |u_A - u_B|
    double s_sup_rel = 0.0;  // s_sup / sup |s_B|
};

ComparisonReport compare(const PhysicalSolution& a, const FrontFixSolution& b,
                         const VectorXd& times);

}  // namespace fbns
