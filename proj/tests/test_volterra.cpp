#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fbns/volterra.hpp"

#include <cmath>

using namespace fbns;

namespace {

PhysicalProblem trivial_problem() {
    return make_constant_problem(1.0, 1.0, 1.0, FluxSpec::constant(0.0));
}

PhysicalProblem generic_problem() {
    return make_bump_problem(1.0, 1.0, 1.0, FluxSpec::linear(0.05, 0.05), 0.05);
}

}  // namespace

TEST_CASE("constants ledger basic structure") {
    const PhysicalProblem p = generic_problem();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);

    CHECK(led.M > 1.0);
    CHECK(led.H == 1.0);
    CHECK(led.R > 2.0);
    CHECK(led.sigma_star > 0.0);
    for (const auto& b : led.bounds) CHECK(b.bound > 0.0);
    for (double v : led.E) CHECK(std::isfinite(v));
    for (double v : led.F) CHECK(std::isfinite(v));

    // the density-driving constant is proportional to D and the sup box:
    // at D = 1, M = 2 it equals 4/sqrt(pi)
    const double e7_unit = led.E[7] / (p.D * led.M);
    CHECK(e7_unit * 1.0 * 2.0 == doctest::Approx(2.2567583341910253).epsilon(1e-12));
}

TEST_CASE("admissible horizon certifies itself and nothing larger") {
    for (const PhysicalProblem& p : {trivial_problem(), generic_problem()}) {
        const TransformedProblem tp = build_transformed_problem(p);
        const ConstantsLedger led = compute_constants(tp, p);
        CHECK(led.admissible(led.sigma_star));
        CHECK(!led.admissible(1.01 * led.sigma_star));
    }
}

TEST_CASE("degenerate geometry is rejected") {
    const PhysicalProblem p = generic_problem();
    TransformedProblem tp = build_transformed_problem(p);
    tp.C1 = tp.C2;  // violates 3 C1 < C2
    CHECK_THROWS_AS(compute_constants(tp, p), ConstraintViolationError);
}

TEST_CASE("boundary evaluation accumulates the density history") {
    const TimeGrid grid(1e-3, 16);
    VectorXd chi1 = VectorXd::Constant(16, 0.25);
    VectorXd chi2 = VectorXd::Zero(16);
    VectorXd w0 = VectorXd::Ones(17);
    const BoundaryEval be(chi1, chi2, w0, FluxSpec::constant(0.0), grid, 0.25, 1.25,
                          1.0, 1.0);
    CHECK(be.cum_chi1(grid.node(16)) == doctest::Approx(0.25e-3).epsilon(1e-13));
    CHECK(be.cum_chi1(grid.node(8)) == doctest::Approx(0.125e-3).epsilon(1e-13));
    // mid-cell point: half the cell contributes
    const double tm = grid.midpoint(3);
    CHECK(be.cum_chi1(tm) == doctest::Approx(0.25 * tm).epsilon(1e-13));
    CHECK(be.C(grid.node(16)) == doctest::Approx(1.0 - 0.25e-3).epsilon(1e-13));
    CHECK(be.w0_at(grid.midpoint(5)) == doctest::Approx(1.0));
}

TEST_CASE("zero density is the exact fixed point for trivial data") {
    const PhysicalProblem p = trivial_problem();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);
    const TimeGrid grid(led.sigma_star, 32);

    const VectorXd w0 = VectorXd::Ones(33);
    auto [psi1, psi2] = apply_psi(VectorXd::Zero(32), VectorXd::Zero(32), w0, tp, p, grid);
    CHECK(psi1.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(psi2.cwiseAbs().maxCoeff() < 1e-12);

    const DensityState st = inner_solve(w0, tp, p, grid);
    CHECK(st.chi1.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(st.chi2.cwiseAbs().maxCoeff() < 1e-12);
    for (int m = 0; m <= 32; ++m) {
        CHECK(st.y0[m] == doctest::Approx(tp.C1 - grid.node(m)).epsilon(1e-12));
        CHECK(st.y1[m] == doctest::Approx(tp.C2).epsilon(1e-12));
        CHECK(st.C_of_t[m] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("outer fixed point on trivial data stays at one") {
    const PhysicalProblem p = trivial_problem();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);
    const DensityState st = outer_solve(tp, p, TimeGrid(led.sigma_star, 32));
    CHECK((st.w0.array() - 1.0).abs().maxCoeff() < 1e-10);
    CHECK(st.outer_iterations <= 2);
}

TEST_CASE("picard iteration contracts on generic data") {
    const PhysicalProblem p = generic_problem();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);
    const TimeGrid grid(led.sigma_star, 64);
    const DensityState st = outer_solve(tp, p, grid);

    for (double r : st.contraction_ratios) CHECK(r < 1.0);
    CHECK(st.chi1.cwiseAbs().maxCoeff() <= led.M);
    CHECK(st.chi2.cwiseAbs().maxCoeff() <= led.M);
    for (int m = 0; m <= 64; ++m) {
        CHECK(st.w0[m] >= 1.0);
        CHECK(st.w0[m] <= led.R);
        CHECK(st.y0[m] >= 0.5 * tp.C1);
        CHECK(st.y0[m] <= 1.5 * tp.C1);
        CHECK(st.y1[m] >= 0.5 * tp.C2);
        CHECK(st.y1[m] <= 1.5 * tp.C2);
    }
}

TEST_CASE("reconstruction reproduces the initial trace") {
    const PhysicalProblem p = generic_problem();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);
    const TimeGrid grid(led.sigma_star, 32);
    const DensityState st = outer_solve(tp, p, grid);

    for (double y : {tp.C1, 0.5 * (tp.C1 + tp.C2), tp.C2}) {
        CHECK(reconstruct_w(st, tp, p, y, 0.0) == doctest::Approx(tp.F(y)).epsilon(1e-12));
    }
    // shortly after the start the field still matches the datum closely
    const double ymid = 0.5 * (tp.C1 + tp.C2);
    CHECK(reconstruct_w(st, tp, p, ymid, grid.node(32)) ==
          doctest::Approx(tp.F(ymid)).epsilon(1e-6));
}

TEST_CASE("horizon guard trips on an absurd horizon") {
    const PhysicalProblem p = generic_problem();
    const TransformedProblem tp = build_transformed_problem(p);
    // chi1 large enough that 1 - int chi1 goes nonpositive inside the window
    const TimeGrid grid(2.0, 16);
    VectorXd chi1 = VectorXd::Constant(16, 1.0);
    const BoundaryEval be(chi1, VectorXd::Zero(16), VectorXd::Ones(17),
                          FluxSpec::constant(0.0), grid, tp.C1, tp.C2, 1.0, 1.0);
    CHECK_THROWS_AS(be.y1(1.5), HorizonExceededError);
}

TEST_CASE("time extension chains segments continuously") {
    const PhysicalProblem p = trivial_problem();
    const TransformedProblem tp = build_transformed_problem(p);
    const ConstantsLedger led = compute_constants(tp, p);
    const SegmentChain chain = extend_solution(tp, p, 2.5 * led.sigma_star, 32);

    CHECK(chain.segments.size() >= 3);
    CHECK(chain.total_horizon >= 2.5 * led.sigma_star * (1.0 - 1e-12));
    for (size_t i = 0; i + 1 < chain.segments.size(); ++i) {
        const Segment& a = chain.segments[i];
        const Segment& b = chain.segments[i + 1];
        const int N = a.state.grid.N;
        CHECK(b.t_offset ==
              doctest::Approx(a.t_offset + a.state.grid.sigma).epsilon(1e-14));
        // boundary curves hand over exactly at the join
        CHECK(b.tp.C1 == doctest::Approx(a.state.y0[N]).epsilon(1e-12));
        CHECK(b.tp.C2 == doctest::Approx(a.state.y1[N]).epsilon(1e-12));
    }
}
