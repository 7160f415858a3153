#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "herdbif/dde.hpp"
#include "herdbif/errors.hpp"
#include "herdbif/linstab.hpp"
#include "test_support.hpp"

using namespace herdbif;
using test_support::Rng;

namespace {

// Independent central-difference Jacobian of the model rhs at the equilibrium.
struct FdJacobian {
    double a11, a12, a21, a22, delay_coeff;
};

FdJacobian fd_jacobian(const ModelParams& mp, const Equilibrium& eq) {
    const double xs = eq.x_star;
    const double ys = eq.y_star;
    auto f = [&](double x, double xd, double y) { return rhs({x, y}, xd, mp).x; };
    auto g = [&](double x, double y) { return rhs({x, y}, xs, mp).y; };
    const double dx = 1e-6 * std::max(1.0, xs);
    const double dy = 1e-6 * std::max(1.0, ys);
    FdJacobian J;
    J.a11 = (f(xs + dx, xs, ys) - f(xs - dx, xs, ys)) / (2.0 * dx);
    J.delay_coeff = (f(xs, xs + dx, ys) - f(xs, xs - dx, ys)) / (2.0 * dx);
    J.a12 = (f(xs, xs, ys + dy) - f(xs, xs, ys - dy)) / (2.0 * dy);
    J.a21 = (g(xs + dx, ys) - g(xs - dx, ys)) / (2.0 * dx);
    J.a22 = (g(xs, ys + dy) - g(xs, ys - dy)) / (2.0 * dy);
    return J;
}

}  // namespace

TEST_CASE("linearize: exact entries on the delay-study set") {
    const ModelParams mp = test_support::stable_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    // exact fractions: a11 = 16/85, a12 = -12/17, a21 = 289/4500, a22 = 289/2250
    CHECK(lin.a11 == doctest::Approx(16.0 / 85.0).epsilon(1e-13));
    CHECK(lin.a12 == doctest::Approx(-12.0 / 17.0).epsilon(1e-13));
    CHECK(lin.a21 == doctest::Approx(289.0 / 4500.0).epsilon(1e-13));
    CHECK(lin.delay_coeff == doctest::Approx(-0.2).epsilon(1e-13));
    CHECK(lin.a22_paper == doctest::Approx(289.0 / 2250.0).epsilon(1e-13));
    CHECK(lin.a12 < 0.0);
    CHECK(lin.a21 > 0.0);
    CHECK(lin.delay_coeff < 0.0);
}

TEST_CASE("linearize: control-set values and the closed-form gain threshold") {
    const ModelParams mp = test_support::cycle_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    CHECK(lin.a11 == doctest::Approx(0.126 / 0.39).epsilon(1e-12));       // 0.323077
    CHECK(lin.a11 - lin.x_star == doctest::Approx(0.126 / 0.39 - 0.3).epsilon(1e-9));
    CHECK(0.5 * (lin.a11 - lin.x_star) == doctest::Approx(0.011538461538).epsilon(1e-8));
}

TEST_CASE("linearize agrees with finite differences over random feasible sets") {
    Rng rng(1001);
    for (int trial = 0; trial < 100; ++trial) {
        const ModelParams mp = rng.feasible_params();
        const auto eq = equilibrium(mp);
        REQUIRE(eq.has_value());
        const Linearization lin = linearize(mp, *eq);
        const FdJacobian J = fd_jacobian(mp, *eq);
        auto rel = [](double a, double b) {
            return std::abs(a - b) / std::max(1.0, std::abs(a));
        };
        CHECK(rel(lin.a11, J.a11) <= 1e-6);
        CHECK(rel(lin.a12, J.a12) <= 1e-6);
        CHECK(rel(lin.a21, J.a21) <= 1e-6);
        CHECK(rel(lin.delay_coeff, J.delay_coeff) <= 1e-6);
        CHECK(std::abs(J.a22) <= 1e-6);  // predator self-term vanishes at the equilibrium
    }
}

TEST_CASE("linearize: entries vanish as x* approaches zero") {
    ModelParams mp = test_support::stable_set();
    mp.d = 0.2 / (1e-5 + 0.2);  // x* = e/d - a = 1e-5
    const auto eq = equilibrium(mp);
    REQUIRE(eq.has_value());
    const Linearization lin = linearize(mp, *eq);
    CHECK(std::abs(lin.a11) < 1e-4);
    CHECK(std::abs(lin.a12) < 1e-4);
}

TEST_CASE("characteristic function: constant term and no-delay reduction") {
    const ModelParams mp = test_support::stable_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);

    const auto h0 = characteristic({0.0, 0.0}, 1.0, 0.0, lin);
    CHECK(h0.real() == doctest::Approx(-lin.a12 * lin.a21).epsilon(1e-13));
    CHECK(h0.real() > 0.0);
    CHECK(h0.imag() == 0.0);

    // at varrho = 0 the function equals the quadratic with merged coefficients
    Rng rng(55);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::complex<double> lam{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const double u = trial % 3 == 0 ? 0.0 : rng.uniform(0.0, 1.0);
        const CharacteristicCoeffs k = controlled_coeffs(lin, u);
        const std::complex<double> quad =
            lam * lam + (k.p1 + k.q1) * lam + (k.p2 + k.q2);
        const std::complex<double> full = characteristic(lam, 0.0, u, lin);
        CHECK(std::abs(full - quad) <= 1e-12);
    }
}

TEST_CASE("imaginary crossings: closed-form values for the delay-study set") {
    const ModelParams mp = test_support::stable_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    const CrossingSet cs = imaginary_crossings(lin, 0.0, 3);
    REQUIRE(cs.exists);

    // hand-solved branch quadratics: cos(w rho) = a11/x* = 16/17,
    // s = sqrt(33)/17, positive-sin branch w = (x* s + sqrt(x*^2 s^2 + 4P))/2
    CHECK(lin.a11 / lin.x_star == doctest::Approx(16.0 / 17.0).epsilon(1e-13));
    CHECK(cs.omega0 == doctest::Approx(0.2493726244960068).epsilon(1e-10));
    CHECK(cs.rho[0] == doctest::Approx(1.3822735374233712).epsilon(1e-9));
    CHECK(cs.transversal == 1);
    REQUIRE(cs.rho.size() == 4);
    for (std::size_t i = 1; i < cs.rho.size(); ++i) {
        CHECK(cs.rho[i] > cs.rho[i - 1]);
        CHECK(cs.rho[i] - cs.rho[i - 1] ==
              doctest::Approx(2.0 * 3.141592653589793 / cs.omega0).epsilon(1e-12));
    }
    // the negative-sin branch crossing comes later: w- < w+, theta- > theta+
    const double s = std::sqrt(1.0 - (16.0 / 17.0) * (16.0 / 17.0));
    const double P = -lin.a12 * lin.a21;
    const double w_neg = 0.5 * (-lin.x_star * s + std::sqrt(lin.x_star * lin.x_star * s * s + 4.0 * P));
    const double rho_neg = (2.0 * 3.141592653589793 - std::acos(16.0 / 17.0)) / w_neg;
    CHECK(cs.rho[0] < rho_neg);

    // every reported crossing is a root of the characteristic function
    for (double r : cs.rho) {
        CHECK(std::abs(characteristic({0.0, cs.omega0}, r, 0.0, lin)) < 1e-9);
    }
}

TEST_CASE("imaginary crossings: closed form and grid-Newton search agree") {
    const ModelParams mp = test_support::stable_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    const CrossingSet closed = imaginary_crossings(lin, 0.0, 2);
    const CrossingSet generic = crossings_for_coeffs(derived_coeffs(lin), 2);
    REQUIRE(closed.exists);
    REQUIRE(generic.exists);
    CHECK(generic.omega0 == doctest::Approx(closed.omega0).epsilon(1e-12));
    CHECK(generic.rho[0] == doctest::Approx(closed.rho[0]).epsilon(1e-12));
    CHECK(generic.transversal == closed.transversal);
}

TEST_CASE("imaginary crossings: no real phase when a11 >= x*") {
    ModelParams mp = test_support::stable_set();
    mp.c = 0.2;  // a11 = 0.064/0.24 = 0.2667 > x* = 0.2
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    CHECK(lin.a11 > lin.x_star);
    const CrossingSet cs = imaginary_crossings(lin, 0.0, 2);
    CHECK_FALSE(cs.exists);
}

TEST_CASE("crossings with a nonzero gain satisfy the root residual bound") {
    const ModelParams mp = test_support::cycle_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    const CrossingSet cs = imaginary_crossings(lin, 0.02, 3);
    REQUIRE(cs.exists);
    for (double r : cs.rho) {
        CHECK(std::abs(characteristic({0.0, cs.omega0}, r, 0.02, lin)) < 1e-9);
    }
}

TEST_CASE("no-delay stability flips exactly at the closed-form gain threshold") {
    const ModelParams mp = test_support::cycle_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    CHECK_FALSE(stability_nodelay(lin, 0.0));
    CHECK(stability_nodelay(lin, 0.012));
    const double thr = 0.5 * (lin.a11 - lin.x_star);
    CHECK_FALSE(stability_nodelay(lin, thr - 1e-6));
    CHECK(stability_nodelay(lin, thr + 1e-6));
}

TEST_CASE("delayed control test reproduces the published gain verdicts") {
    const ModelParams mp = test_support::cycle_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    CHECK_FALSE(control_stability_delay(lin, 0.04, 2.0));
    CHECK(control_stability_delay(lin, 1.0, 2.0));
    CHECK(control_stability_delay(lin, 10.0, 2.0));
    const double thr = min_stabilizing_u(lin, 2.0, 0.0, 1.0, 1e-4);
    CHECK(thr == doctest::Approx(0.051).epsilon(0.1));  // published scan value
    CHECK(thr > 0.046);
    CHECK(thr < 0.056);
    // the probe root satisfies Re H = 0 to 1e-9
    const auto probe = control_re_root(lin, 0.04, 2.0);
    REQUIRE(probe.has_value());
    const CharacteristicCoeffs k = controlled_coeffs(lin, 0.04);
    const double re_h = -probe->omega0 * probe->omega0 + k.p2 +
                        k.q2 * std::cos(probe->omega0 * 2.0) +
                        k.q1 * probe->omega0 * std::sin(probe->omega0 * 2.0);
    CHECK(std::abs(re_h) < 1e-9);
}

TEST_CASE("minimum stabilizing gain: closed-form agreement and bracket errors") {
    const ModelParams mp = test_support::cycle_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    const double u0 = min_stabilizing_u(lin, 0.0, 0.0, 1.0, 1e-7);
    CHECK(u0 == doctest::Approx(0.5 * (lin.a11 - lin.x_star)).epsilon(1e-6));
    CHECK_THROWS_AS(min_stabilizing_u(lin, 2.0, 0.5, 1.0, 1e-4), InvalidBracket);
    CHECK_THROWS_AS(min_stabilizing_u(lin, 2.0, 0.0, 0.01, 1e-4), InvalidBracket);
}

TEST_CASE("delay-dependent condition report: printed closed forms") {
    const ModelParams mp = test_support::stable_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);

    const LyapunovReport r05 = lyapunov_conditions(lin, 0.5);
    // direct substitution of the printed pi expressions (a22 = d y*^2 / e)
    // at the exact rational Jacobian entries of this set
    const double a11 = 16.0 / 85.0;
    const double a12 = -12.0 / 17.0;
    const double a22 = 289.0 / 2250.0;
    const double xs = 0.2;
    CHECK(r05.pi0 == doctest::Approx(a12 * xs / (2.0 * a12 * xs - a11 - a22)).epsilon(1e-12));
    CHECK(r05.pi0 == doctest::Approx(5400.0 / 22913.0).epsilon(1e-12));  // exact fraction
    CHECK(r05.pi1 ==
          doctest::Approx(xs * (2.0 * a11 * a12 + 2.0 * a12 * a12 - 0.5 * a11 * a22 -
                                0.5 * a22 * a22))
              .epsilon(1e-12));
    CHECK(r05.pi2 ==
          doctest::Approx(a11 * a12 * xs - a12 * a12 * xs - 4.0 * a11 * a12).epsilon(1e-12));
    CHECK(r05.pi3 ==
          doctest::Approx(a11 * a12 * (2.0 - xs) - 0.5 * a22 * xs * (a11 + a22)).epsilon(1e-12));
    // coarse decimal anchors
    CHECK(r05.pi0 == doctest::Approx(0.235674).epsilon(1e-5));
    CHECK(r05.pi1 == doctest::Approx(0.142092).epsilon(1e-5));
    CHECK(r05.pi2 == doctest::Approx(0.405260).epsilon(1e-5));
    CHECK(r05.pi3 == doctest::Approx(-0.243237).epsilon(1e-5));
    CHECK(r05.pi0_defined);
    CHECK(r05.cond_a);        // 0.5 > 0.2357
    CHECK_FALSE(r05.cond_b);  // quadratic negative at 0.5
    CHECK_FALSE(r05.verdict);

    const LyapunovReport r2 = lyapunov_conditions(lin, 2.0);
    CHECK(r2.cond_a);
    CHECK(r2.cond_b);
    CHECK(r2.verdict);
}

TEST_CASE("delay-dependent condition is sufficient-only: verdict can disagree with simulation") {
    // The printed conditions hold at varrho = 2 for the delay-study set, yet
    // the delayed system orbits a limit cycle there (the crossing sits at
    // 1.3823). The report is informational; callers must not treat a true
    // verdict as a stability guarantee.
    const ModelParams mp = test_support::stable_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    REQUIRE(lyapunov_conditions(lin, 2.0).verdict);
    SimOptions opt;
    const Trajectory tr =
        simulate(mp, History::constant({1.0, 0.3}), 2.0, 0.0, std::nullopt, opt);
    CHECK(classify(tr, opt).cls == OutcomeClass::Periodic);
}

TEST_CASE("pi0 denominator zero is reported as undefined") {
    Linearization lin;
    lin.a11 = 0.1;
    lin.a12 = -0.5;
    lin.a21 = 0.2;
    lin.x_star = 0.2;
    lin.y_star = 0.3;
    lin.delay_coeff = -0.2;
    lin.a22_paper = 2.0 * lin.a12 * lin.x_star - lin.a11;  // denominator vanishes
    const LyapunovReport rep = lyapunov_conditions(lin, 1.0);
    CHECK_FALSE(rep.pi0_defined);
    CHECK_FALSE(rep.verdict);
}

TEST_CASE("delay bound: golden-ratio synthetic case") {
    const DelayBoundReport rep = delay_bound({1.0, 2.0, 1.0, 1.0, CoeffSource::Derived});
    REQUIRE(rep.eta_plus.has_value());
    REQUIRE(rep.rho_plus.has_value());
    CHECK(*rep.eta_plus == doctest::Approx(1.618033988749895).epsilon(1e-9));
    CHECK(*rep.rho_plus == doctest::Approx(0.4472135954999579).epsilon(1e-9));
    CHECK(rep.valid);
    CHECK(*rep.rho_plus > 0.0);
}

TEST_CASE("delay bound: both coefficient sources are inapplicable on the study set") {
    const ModelParams mp = test_support::stable_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);

    const DelayBoundReport derived = delay_bound(derived_coeffs(lin));
    CHECK_FALSE(derived.valid);
    CHECK(derived.reason.find("q2 = 0") != std::string::npos);
    CHECK(derived.eta_plus.has_value());  // still computable, reported anyway

    const DelayBoundReport paper5 = delay_bound(paper_section5_coeffs(lin));
    CHECK_FALSE(paper5.valid);
    CHECK(paper5.reason.find("discriminant") != std::string::npos);
    CHECK_FALSE(paper5.eta_plus.has_value());
}

TEST_CASE("coefficient sources: derived vs published section forms") {
    const ModelParams mp = test_support::stable_set();
    const auto eq = equilibrium(mp);
    const Linearization lin = linearize(mp, *eq);
    const CharacteristicCoeffs kd = derived_coeffs(lin);
    CHECK(kd.p1 == doctest::Approx(-lin.a11));
    CHECK(kd.p2 == doctest::Approx(-lin.a12 * lin.a21));
    CHECK(kd.q1 == doctest::Approx(lin.x_star));
    CHECK(kd.q2 == 0.0);
    const CharacteristicCoeffs k5 = paper_section5_coeffs(lin);
    CHECK(k5.p2 == doctest::Approx(lin.a11 * lin.a22_paper));
    CHECK(k5.q2 == doctest::Approx(-lin.x_star * lin.a12));
    CHECK(k5.q2 > 0.0);
    // controlled coefficients reduce to the derived ones at u = 0
    const CharacteristicCoeffs k0 = controlled_coeffs(lin, 0.0);
    CHECK(k0.p1 == kd.p1);
    CHECK(k0.p2 == kd.p2);
    CHECK(k0.q1 == kd.q1);
    CHECK(k0.q2 == kd.q2);
}
