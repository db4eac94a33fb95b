#pragma once

#include "fbns/volterra.hpp"

namespace fbns {

/// Parametric physical solution: per time slice an x-grid from 0 to s(t) and
/// the concentration on it, plus the front trajectory.
struct PhysicalSolution {
    VectorXd times;
    std::vector<VectorXd> x;  // one increasing grid per time slice
    std::vector<VectorXd> u;  // matching concentration samples
    VectorXd s;               // front position per time slice

    Eigen::Index slices() const { return times.size(); }
    /// Linear interpolation of u on slice k, clamped to [0, s].
    double u_at(Eigen::Index k, double xq) const;
    /// Linear interpolation of s(t).
    double s_at(double t) const;
};

struct SliceInversion {
    VectorXd x;
    VectorXd u;
    double s = 0.0;
};

/// Invert the heat-frame state at one time through the transformation chain.
SliceInversion invert_state(const DensityState& state, const TransformedProblem& tp,
                            const PhysicalProblem& p, double t, int Ny = 65);

/// Invert a converged segment at every node (from_node lets chained segments
/// skip the duplicated join slice).
PhysicalSolution invert_segment(const DensityState& state, const TransformedProblem& tp,
                                const PhysicalProblem& p, int Ny = 65,
                                double t_offset = 0.0, int from_node = 0);

PhysicalSolution invert_chain(const SegmentChain& chain, int Ny = 65);

struct ResidualReport {
    double pde_sup = 0.0;        // |u_t - u^2 (D u_xx - u_x)| interior sup
    double neumann_sup = 0.0;    // |D u_x(0,t) - g(t)|
    double dirichlet_sup = 0.0;  // |u(s(t),t) - beta|
    double stefan_sup = 0.0;     // |D u_x(s,t) - u(s,t) + s'(t)|
    double flux_bc_sup = 0.0;    // heat-frame flux condition, displayed form
    double flux_bc_alt_sup = 0.0;  // heat-frame flux condition, converse-proof form
};

ResidualReport residual_report(const PhysicalSolution& sol, const DensityState& state,
                               const TransformedProblem& tp, const PhysicalProblem& p);

}  // namespace fbns
