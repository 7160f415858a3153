#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "herdbif/model.hpp"
#include "test_support.hpp"

using namespace herdbif;
using test_support::Rng;

TEST_CASE("nondimensionalize: identity scaling passes parameters through") {
    DimensionalParams dp{1.0, 1.0, 1.2, 0.3, 0.5, 0.2, 0.2, 2.0, 1.0};
    const auto nd = nondimensionalize(dp);
    CHECK(nd.params.m == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(nd.params.c == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(nd.params.d == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(nd.params.e == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(nd.params.a == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(nd.params.p == 2.0);
    CHECK(nd.varrho == doctest::Approx(1.0));
}

TEST_CASE("nondimensionalize: scaled inputs reduce to the same parameter set") {
    // hand-evaluated: m = 4.8/(2*2) = 1.2, c = 1.2/4 = 0.3, d = 0.5*2/2 = 0.5,
    // e = 0.4/2 = 0.2, a = 0.4/2 = 0.2, varrho = 2*0.5 = 1
    DimensionalParams dp{2.0, 2.0, 4.8, 1.2, 0.5, 0.4, 0.4, 2.0, 0.5};
    const auto nd = nondimensionalize(dp);
    CHECK(nd.params.m == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(nd.params.c == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(nd.params.d == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(nd.params.e == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(nd.params.a == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(nd.varrho == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("nondimensionalize round-trips with its algebraic inverse") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        DimensionalParams dp;
        dp.R = rng.uniform(0.2, 5.0);
        dp.K = rng.uniform(0.2, 5.0);
        dp.M = rng.uniform(0.1, 4.0);
        dp.C = rng.uniform(0.1, 4.0);
        dp.D = rng.uniform(0.1, 2.0);
        dp.E = rng.uniform(0.1, 2.0);
        dp.A = rng.uniform(0.1, 2.0);
        dp.p = rng.uniform(1.2, 3.5);
        dp.tau = rng.uniform(0.1, 3.0);
        const auto nd = nondimensionalize(dp);
        const DimensionalParams back = dimensionalize(nd.params, nd.varrho, dp.R, dp.K);
        CHECK(back.M == doctest::Approx(dp.M).epsilon(1e-12));
        CHECK(back.C == doctest::Approx(dp.C).epsilon(1e-12));
        CHECK(back.D == doctest::Approx(dp.D).epsilon(1e-12));
        CHECK(back.E == doctest::Approx(dp.E).epsilon(1e-12));
        CHECK(back.A == doctest::Approx(dp.A).epsilon(1e-12));
        CHECK(back.tau == doctest::Approx(dp.tau).epsilon(1e-12));
    }
}

TEST_CASE("parameter validation rejects non-positive values and p <= 1") {
    DimensionalParams dp{1.0, 1.0, 1.2, 0.3, 0.5, 0.2, 0.2, 2.0, 1.0};
    CHECK_NOTHROW(dp.validate());
    dp.p = 1.0;
    CHECK_THROWS_AS(dp.validate(), std::invalid_argument);
    dp.p = 2.0;
    dp.K = 0.0;
    CHECK_THROWS_AS(dp.validate(), std::invalid_argument);

    ModelParams mp = test_support::stable_set();
    CHECK_NOTHROW(mp.validate());
    mp.c = -0.1;
    CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
    mp = test_support::stable_set();
    mp.p = 1.0;
    CHECK_THROWS_AS(mp.validate(), std::invalid_argument);
}

TEST_CASE("functional response: zero at origin, known value, analytic peak") {
    const ModelParams mp = test_support::stable_set();
    CHECK(functional_response(0.0, mp) == 0.0);
    CHECK(functional_response(1.0, mp) == doctest::Approx(1.2 / 1.3).epsilon(1e-15));
    // peak of m x/(x^p + c) at (c/(p-1))^(1/p); grid search cross-check
    const double peak = functional_response_peak(mp);
    CHECK(peak == doctest::Approx(std::sqrt(0.3)).epsilon(1e-12));
    double best_x = 0.0;
    double best_f = -1.0;
    for (int i = 1; i <= 20000; ++i) {
        const double x = 2.0 * i / 20000.0;
        const double f = functional_response(x, mp);
        if (f > best_f) {
            best_f = f;
            best_x = x;
        }
    }
    CHECK(best_x == doctest::Approx(peak).epsilon(1e-3));
}

TEST_CASE("functional response is unimodal with the analytic peak for random parameters") {
    Rng rng(202);
    for (int trial = 0; trial < 50; ++trial) {
        ModelParams mp = rng.feasible_params();
        const double peak = functional_response_peak(mp);
        const double x_max = 4.0 * peak;
        int sign_changes = 0;
        int last_sign = 0;
        double prev = 0.0;
        double grid_peak = 0.0;
        double best = -1.0;
        for (int i = 1; i <= 4000; ++i) {
            const double x = x_max * i / 4000.0;
            const double f = functional_response(x, mp);
            if (f > best) {
                best = f;
                grid_peak = x;
            }
            const double slope = f - prev;
            const int sign = slope > 0.0 ? 1 : (slope < 0.0 ? -1 : 0);
            if (sign != 0 && last_sign != 0 && sign != last_sign) ++sign_changes;
            if (sign != 0) last_sign = sign;
            prev = f;
        }
        CHECK(sign_changes == 1);
        CHECK(grid_peak == doctest::Approx(peak).epsilon(2e-3));
    }
}

TEST_CASE("group defence axioms hold on the reference sets and reject p = 1") {
    GroupDefenceReport rep = group_defence_axioms(test_support::stable_set(), 3.0, 3000);
    CHECK(rep.ok);
    CHECK(rep.peak == doctest::Approx(std::sqrt(0.3)).epsilon(5e-3));

    ModelParams cubic{1.0, 3.0, 1.0, 0.5, 0.2, 0.2};
    rep = group_defence_axioms(cubic, 5.0, 3000);
    CHECK(rep.ok);
    CHECK(rep.peak == doctest::Approx(functional_response_peak(cubic)).epsilon(5e-3));

    ModelParams monotone = test_support::stable_set();
    monotone.p = 1.0;
    rep = group_defence_axioms(monotone, 3.0, 3000);
    CHECK_FALSE(rep.ok);
    CHECK(rep.failure.find("monotone") != std::string::npos);

    CHECK_THROWS_AS(group_defence_axioms(test_support::stable_set(), 3.0, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(group_defence_axioms(test_support::stable_set(), -1.0, 1000),
                    std::invalid_argument);
}

TEST_CASE("equilibrium: closed form values and infeasible boundaries") {
    const auto eq1 = equilibrium(test_support::stable_set());
    REQUIRE(eq1.has_value());
    CHECK(eq1->x_star == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(eq1->y_star == doctest::Approx(17.0 / 75.0).epsilon(1e-14));
    CHECK(eq1->feasible);

    const auto eq2 = equilibrium(test_support::cycle_set());
    REQUIRE(eq2.has_value());
    CHECK(eq2->x_star == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(eq2->y_star == doctest::Approx(0.2275).epsilon(1e-14));

    ModelParams boundary = test_support::stable_set();
    boundary.d = 1.0;  // x* = e/d - a = 0
    CHECK_FALSE(equilibrium(boundary).has_value());
    boundary.d = 0.1;  // x* = 1.8 > 1
    CHECK_FALSE(equilibrium(boundary).has_value());
}

TEST_CASE("equilibrium feasibility flag agrees with 0 < e/d - a < 1") {
    Rng rng(303);
    for (int trial = 0; trial < 500; ++trial) {
        ModelParams mp;
        mp.m = rng.uniform(0.5, 2.0);
        mp.p = rng.uniform(1.5, 3.0);
        mp.c = rng.uniform(0.1, 1.0);
        mp.d = rng.uniform(0.1, 1.0);
        mp.e = rng.uniform(0.02, 1.0);
        mp.a = rng.uniform(0.05, 1.2);
        const double xs = mp.e / mp.d - mp.a;
        CHECK(equilibrium(mp).has_value() == (xs > 0.0 && xs < 1.0));
    }
}

TEST_CASE("rhs vanishes at the equilibrium, with and without control") {
    const ModelParams mp = test_support::stable_set();
    const auto eq = equilibrium(mp);
    REQUIRE(eq.has_value());
    const State at{eq->x_star, eq->y_star};
    const State d0 = rhs(at, eq->x_star, mp);
    CHECK(std::abs(d0.x) < 1e-12);
    CHECK(std::abs(d0.y) < 1e-12);
    const State dc = rhs(at, eq->x_star, mp, 0.7, eq);
    CHECK(std::abs(dc.x) < 1e-12);
    CHECK(std::abs(dc.y) < 1e-12);
}

TEST_CASE("rhs: direct evaluation away from the equilibrium") {
    const ModelParams mp = test_support::stable_set();
    const State d = rhs({1.0, 0.3}, 1.0, mp);
    CHECK(d.x == doctest::Approx(-0.36 / 1.3).epsilon(1e-14));
    CHECK(d.y == doctest::Approx(0.03).epsilon(1e-14));
    // control rate requires a target
    CHECK_THROWS(rhs({1.0, 0.3}, 1.0, mp, 0.1, std::nullopt));
}

TEST_CASE("equilibrium zeroes rhs for random feasible parameter sets") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const ModelParams mp = rng.feasible_params();
        const auto eq = equilibrium(mp);
        REQUIRE(eq.has_value());
        const State d = rhs({eq->x_star, eq->y_star}, eq->x_star, mp);
        CHECK(std::abs(d.x) < 1e-12);
        CHECK(std::abs(d.y) < 1e-12);
    }
}

TEST_CASE("boundedness check on the delay-study set") {
    const ModelParams mp = test_support::stable_set();
    const BoundednessReport rep = boundedness_check(mp);
    CHECK(rep.mu == doctest::Approx(0.2).epsilon(1e-15));
    // d x*/(x*^p + c) = 0.5*0.2/0.34 = 0.294... > mu
    CHECK(rep.cond1);
    // left side d - e/(x* + a) is exactly zero at the equilibrium
    CHECK(rep.cond2);
    CHECK(rep.bound_x == 1.0);
    CHECK(rep.bound_y == doctest::Approx(2.5).epsilon(1e-14));

    ModelParams infeasible = mp;
    infeasible.d = 1.0;
    CHECK_THROWS_AS(boundedness_check(infeasible), std::invalid_argument);
}
