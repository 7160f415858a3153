#include "herdbif/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace herdbif {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

void DimensionalParams::validate() const {
    require_positive(R, "R");
    require_positive(K, "K");
    require_positive(M, "M");
    require_positive(C, "C");
    require_positive(D, "D");
    require_positive(E, "E");
    require_positive(A, "A");
    require_positive(tau, "tau");
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw std::invalid_argument("p must be > 1");
    }
}

void ModelParams::validate() const {
    require_positive(m, "m");
    require_positive(c, "c");
    require_positive(d, "d");
    require_positive(e, "e");
    require_positive(a, "a");
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw std::invalid_argument("p must be > 1");
    }
}

Nondimensionalized nondimensionalize(const DimensionalParams& dp) {
    dp.validate();
    Nondimensionalized out;
    out.params.m = dp.M / (dp.R * std::pow(dp.K, dp.p - 1.0));
    out.params.p = dp.p;
    out.params.c = dp.C / std::pow(dp.K, dp.p);
    out.params.d = dp.D * dp.K / dp.R;
    out.params.e = dp.E / dp.R;
    out.params.a = dp.A / dp.K;
    out.varrho = dp.R * dp.tau;
    return out;
}

DimensionalParams dimensionalize(const ModelParams& mp, double varrho, double R, double K) {
    mp.validate();
    require_positive(R, "R");
    require_positive(K, "K");
    require_positive(varrho, "varrho");
    DimensionalParams dp;
    dp.R = R;
    dp.K = K;
    dp.M = mp.m * R * std::pow(K, mp.p - 1.0);
    dp.C = mp.c * std::pow(K, mp.p);
    dp.D = mp.d * R / K;
    dp.E = mp.e * R;
    dp.A = mp.a * K;
    dp.p = mp.p;
    dp.tau = varrho / R;
    return dp;
}

GroupDefenceReport group_defence_axioms(const ModelParams& mp, double x_max, int n) {
    if (!(x_max > 0.0)) throw std::invalid_argument("x_max must be positive");
    if (n < 100) throw std::invalid_argument("grid size must be at least 100");

    GroupDefenceReport rep;
    if (!(mp.p > 1.0)) {
        rep.failure = "p <= 1: the response is monotone, not group defence";
        return rep;
    }
    mp.validate();

    rep.zero_at_origin = functional_response(0.0, mp) == 0.0;
    if (!rep.zero_at_origin) rep.failure = "F(0) != 0";

    // F on the grid, tracking positivity and the slope sign pattern.
    rep.positive = true;
    rep.bounded = true;
    double prev = 0.0;
    double best = -1.0;
    int sign_changes = 0;
    int last_sign = 0;
    for (int i = 1; i <= n; ++i) {
        const double x = x_max * static_cast<double>(i) / n;
        const double f = functional_response(x, mp);
        if (!(f > 0.0)) {
            rep.positive = false;
            if (rep.failure.empty()) rep.failure = "F not positive at x = " + std::to_string(x);
        }
        if (!std::isfinite(f)) {
            rep.bounded = false;
            if (rep.failure.empty()) rep.failure = "F not finite at x = " + std::to_string(x);
        }
        if (f > best) {
            best = f;
            rep.peak = x;
        }
        const double slope = f - prev;
        const int sign = slope > 0.0 ? 1 : (slope < 0.0 ? -1 : 0);
        if (sign != 0) {
            if (last_sign != 0 && sign != last_sign) ++sign_changes;
            last_sign = sign;
        }
        prev = f;
    }
    rep.single_peak = sign_changes == 1 && last_sign == -1;
    if (!rep.single_peak && rep.failure.empty()) {
        rep.failure = sign_changes == 0
                          ? "F is monotone over (0, x_max]; no interior peak"
                          : "slope sign changed " + std::to_string(sign_changes) + " times";
    }
    rep.ok = rep.zero_at_origin && rep.positive && rep.bounded && rep.single_peak;
    if (rep.ok) rep.failure.clear();
    return rep;
}

std::optional<Equilibrium> equilibrium(const ModelParams& mp) {
    mp.validate();
    const double xs = mp.e / mp.d - mp.a;
    if (!(xs > 0.0) || !(xs < 1.0)) return std::nullopt;
    const double ys = (1.0 - xs) * (pow_p(xs, mp.p) + mp.c) / mp.m;
    return Equilibrium{xs, ys, true};
}

BoundednessReport boundedness_check(const ModelParams& mp) {
    const auto eq = equilibrium(mp);
    if (!eq) throw std::invalid_argument("boundedness_check needs a feasible equilibrium");

    BoundednessReport rep;
    rep.mu = std::min(mp.m, mp.e);
    const double xs = eq->x_star;
    const double ys = eq->y_star;
    rep.cond1 = rep.mu < mp.d * xs / (pow_p(xs, mp.p) + mp.c);
    // The left side is d - e/(x* + a) = 0 by the definition of x*, so this
    // condition is vacuous when evaluated at the equilibrium point.
    rep.cond2 = (mp.d - mp.e / (xs + mp.a)) < (mp.d / mp.m) * (xs / ys) * (xs / ys);
    rep.bound_x = 1.0;
    rep.bound_y = mp.d * (1.0 + rep.mu) / (mp.m * rep.mu);
    return rep;
}

}  // namespace herdbif
