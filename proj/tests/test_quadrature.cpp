#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fbns/quadrature.hpp"

#include <cmath>

using namespace fbns;

TEST_CASE("time grid invariants") {
    CHECK_THROWS_AS(TimeGrid(0.0, 64), InvalidInputError);
    CHECK_THROWS_AS(TimeGrid(-1.0, 64), InvalidInputError);
    CHECK_THROWS_AS(TimeGrid(1.0, 4), InvalidInputError);
    const TimeGrid g(2.0, 8);
    CHECK(g.h() == doctest::Approx(0.25));
    CHECK(g.node(8) == doctest::Approx(2.0));
    CHECK(g.midpoint(0) == doctest::Approx(0.125));
}

TEST_CASE("composite rule on smooth data") {
    const VectorXd xs = linspace(0.0, 1.0, 101);
    VectorXd cubic(101), quartic(101);
    for (int i = 0; i < 101; ++i) {
        cubic[i] = xs[i] * xs[i] * xs[i];
        quartic[i] = xs[i] * xs[i] * xs[i] * xs[i];
    }
    CHECK(integrate_space(xs, cubic) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(integrate_space(xs, quartic) == doctest::Approx(0.2).epsilon(1e-8));
}

TEST_CASE("composite rule rejects unsorted abscissae") {
    VectorXd xs(3), vs(3);
    xs << 0.0, 2.0, 1.0;
    vs << 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(integrate_space(xs, vs), InvalidInputError);
}

TEST_CASE("product rule resolves the square-root singularity") {
    // int_0^1 tau (1-tau)^{-1/2} dtau = 4/3
    auto run = [](int N) {
        const TimeGrid grid(1.0, N);
        VectorXd chi(N);
        for (int j = 0; j < N; ++j) chi[j] = grid.midpoint(j);
        return integrate_singular_history(
            chi, grid, 1.0, [](double t, double tau) { return 1.0 / std::sqrt(t - tau); });
    };
    const double e256 = std::abs(run(256) - 4.0 / 3.0);
    const double e512 = std::abs(run(512) - 4.0 / 3.0);
    CHECK(e256 < 2e-4);
    CHECK(e512 < e256);
}

TEST_CASE("product rule is exact for constant regularized integrands") {
    // chi = 1 against the bare singular weight: int_0^t (t-tau)^{-1/2} = 2 sqrt(t)
    const TimeGrid grid(0.5, 32);
    const VectorXd chi = VectorXd::Ones(32);
    for (double t : {0.5, 0.37}) {
        const double got = integrate_singular_history(
            chi, grid, t, [](double tt, double tau) { return 1.0 / std::sqrt(tt - tau); });
        CHECK(got == doctest::Approx(2.0 * std::sqrt(t)).epsilon(1e-13));
    }
}

TEST_CASE("gaussian-weighted integral at vanishing bandwidth") {
    // at s -> 0 the weight concentrates at the center
    for (double s : {1e-13, 1e-6, 0.1}) {
        const double mass = integrate_gaussian([](double) { return 1.0; }, -5.0, 5.0,
                                               0.3, s, 1.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
        const double mean =
            integrate_gaussian([](double xi) { return xi; }, -5.0, 5.0, 0.3, s, 1.0);
        CHECK(mean == doctest::Approx(0.3).epsilon(1e-9));
    }
}

TEST_CASE("gaussian-weighted integral respects the domain clip") {
    // half mass when the domain stops at the center
    const double half =
        integrate_gaussian([](double) { return 1.0; }, -5.0, 0.3, 0.3, 0.01, 1.0);
    CHECK(half == doctest::Approx(0.5).epsilon(1e-10));
}
