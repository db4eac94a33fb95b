#pragma once

#include "fbns/problem.hpp"
#include "fbns/quadrature.hpp"

#include <array>
#include <string>
#include <vector>

namespace fbns {

// ---------------------------------------------------------------------------
// A-priori constants and the admissible horizon
// ---------------------------------------------------------------------------

struct SigmaBound {
    std::string name;
    double bound = 0.0;  // largest admissible sigma for this inequality
};

struct ConstantsLedger {
    std::array<double, 11> E{};  // growth bounds for the map on density pairs
    std::array<double, 11> F{};  // Lipschitz bounds for the same map
    double E31 = 0.0, E32 = 0.0;
    double F31 = 0.0, F32 = 0.0, F51 = 0.0;
    double M = 0.0;   // a-priori sup bound on the density pair
    double H = 1.0;   // lower bound of the admissible w0 band
    double R = 0.0;   // upper bound of the admissible w0 band
    double sigma_star = 0.0;
    std::vector<SigmaBound> bounds;  // individual admissibility bounds

    /// True iff every admissibility inequality holds at the given sigma.
    bool admissible(double sigma) const;
};

ConstantsLedger compute_constants(const TransformedProblem& tp, const PhysicalProblem& p);

// ---------------------------------------------------------------------------
// Density state and boundary evaluation
// ---------------------------------------------------------------------------

struct DensityState {
    TimeGrid grid;
    VectorXd chi1;  // w_y on the upper boundary, at cell midpoints
    VectorXd chi2;  // w on the lower boundary, at cell midpoints
    VectorXd w0;    // outer unknown, at nodes
    VectorXd y0;    // lower free boundary, at nodes
    VectorXd y1;    // upper free boundary, at nodes
    VectorXd C_of_t;  // C(t) = 1 - int chi1, at nodes
    std::vector<double> contraction_ratios;  // inner Picard ratio history
    int inner_iterations = 0;
    int outer_iterations = 0;
};

/// On-demand evaluation of the boundary curves induced by midpoint density
/// samples; history integrals use the midpoint rule with piecewise-constant
/// densities, so any t in [0, sigma] is admissible.
class BoundaryEval {
  public:
    BoundaryEval(const VectorXd& chi1, const VectorXd& chi2, const VectorXd& w0_nodes,
                 const FluxSpec& g, const TimeGrid& grid, double C1, double C2,
                 double D, double beta);

    double cum_chi1(double t) const;  // int_0^t chi1
    double C(double t) const { return 1.0 - cum_chi1(t); }
    double y0(double t) const;
    double y1(double t) const;  // throws HorizonExceededError on log(<=0)
    double w0_at(double t) const;

  private:
    double prefix(const VectorXd& cells, const VectorXd& node_cum, double t) const;

    const TimeGrid grid_;
    VectorXd chi1_cells_, chi2_over_w0_cells_, g_cells_;
    VectorXd chi1_cum_, chi2_over_w0_cum_, g_cum_;  // node prefix sums
    VectorXd w0_nodes_;
    double C1_, C2_, D_, beta_;
};

/// Boundary curves at the grid nodes for given densities.
std::pair<VectorXd, VectorXd> free_boundaries(const VectorXd& chi1, const VectorXd& chi2,
                                              const VectorXd& w0_nodes, const FluxSpec& g,
                                              const TimeGrid& grid,
                                              const TransformedProblem& tp,
                                              const PhysicalProblem& p);

/// One application of the integral-system map to the density pair, collocated
/// at the cell midpoints.
std::pair<VectorXd, VectorXd> apply_psi(const VectorXd& chi1, const VectorXd& chi2,
                                        const VectorXd& w0_nodes,
                                        const TransformedProblem& tp,
                                        const PhysicalProblem& p, const TimeGrid& grid);

/// Picard iteration on the density pair for a frozen w0.
DensityState inner_solve(const VectorXd& w0_nodes, const TransformedProblem& tp,
                         const PhysicalProblem& p, const TimeGrid& grid,
                         double tol = 1e-10, int max_iter = 200);

/// Heat-frame field from the converged densities; w(y, 0) is the initial
/// trace itself.
double reconstruct_w(const DensityState& state, const TransformedProblem& tp,
                     const PhysicalProblem& p, double y, double t);

/// One step of the outer map: w0'(t) = C(t) + (1/D) int_{y0}^{y1} w.
VectorXd phi_update(const DensityState& state, const TransformedProblem& tp,
                    const PhysicalProblem& p, int Ny = 65);

/// Outer fixed point on w0 (each iterate clamped into [1, R]), with the inner
/// Picard solve nested per sweep.
DensityState outer_solve(const TransformedProblem& tp, const PhysicalProblem& p,
                         const TimeGrid& grid, double tol_outer = 1e-8,
                         double relax = 1.0, int max_outer = 50, int Ny = 65,
                         double tol_inner = 1e-10);

// ---------------------------------------------------------------------------
// Time extension
// ---------------------------------------------------------------------------

struct Segment {
    double t_offset = 0.0;       // global time of this segment's origin
    TransformedProblem tp;
    PhysicalProblem p;           // flux shifted to the segment origin
    ConstantsLedger ledger;
    DensityState state;
};

struct SegmentChain {
    std::vector<Segment> segments;
    double total_horizon = 0.0;
};

struct PartialResultError : SolverError {
    PartialResultError(const std::string& msg, SegmentChain completed)
        : SolverError(msg), chain(std::move(completed)) {}
    SegmentChain chain;
};

/// Restart the pipeline from the converged trace at the end of each segment
/// until the cumulative horizon reaches T.
SegmentChain extend_solution(const TransformedProblem& tp, const PhysicalProblem& p,
                             double T, int N, double tol_outer = 1e-8,
                             int Ny = 65, int max_segments = 64);

}  // namespace fbns
