#pragma once

#include <cmath>
#include <optional>
#include <string>

namespace herdbif {

/// Dimensional parameters of the predator-prey model: logistic prey growth
/// with a maturation delay, a unimodal (group-defence) predation term, and a
/// modified Leslie-Gower generalist predator.
struct DimensionalParams {
    double R = 0.0;    ///< intrinsic prey growth rate (1/time)
    double K = 0.0;    ///< environmental carrying capacity (density)
    double M = 0.0;    ///< maximum predation rate
    double C = 0.0;    ///< environmental protection given to the prey
    double D = 0.0;    ///< predator reproduction rate
    double E = 0.0;    ///< maximum predator death rate
    double A = 0.0;    ///< residual predator loss at severe prey scarcity
    double p = 0.0;    ///< pack-shape exponent (dimensionless), > 1
    double tau = 0.0;  ///< maturation delay (time)

    /// Throws std::invalid_argument unless all fields are positive and p > 1.
    void validate() const;
};

/// Non-dimensional parameters of the rescaled system
///   x' = x (1 - x(t - varrho)) - m x y / (x^p + c)
///   y' = (d - e / (x + a)) y^2
struct ModelParams {
    double m = 0.0;
    double p = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
    double a = 0.0;

    void validate() const;
};

/// Non-dimensional (prey, predator) densities. Doubles also as a derivative.
struct State {
    double x = 0.0;
    double y = 0.0;
};

/// Interior equilibrium x* = e/d - a, y* = (1 - x*)(x*^p + c)/m.
struct Equilibrium {
    double x_star = 0.0;
    double y_star = 0.0;
    bool feasible = false;  ///< 0 < x* < 1 and y* > 0
};

/// Flags for the boundedness conditions of the undelayed system, evaluated at
/// the interior equilibrium, plus the resulting bounds.
struct BoundednessReport {
    double mu = 0.0;       ///< min(m, e)
    bool cond1 = false;    ///< mu < d x* / (x*^p + c)
    bool cond2 = false;    ///< d - e/(x* + a) < (d/m)(x*/y*)^2; left side is exactly 0
                           ///< at the equilibrium, so this holds vacuously there
    double bound_x = 0.0;  ///< M1 = 1
    double bound_y = 0.0;  ///< M2 = d (1 + mu) / (m mu)
};

/// Outcome of the grid check that the functional response qualifies as a
/// group-defence response: zero at the origin, positive, bounded, increasing
/// then decreasing with a single slope sign change.
struct GroupDefenceReport {
    bool ok = false;
    bool zero_at_origin = false;
    bool positive = false;
    bool bounded = false;
    bool single_peak = false;
    double peak = 0.0;     ///< grid estimate of the response maximum location
    std::string failure;   ///< which axiom failed and where; empty when ok
};

struct Nondimensionalized {
    ModelParams params;
    double varrho = 0.0;  ///< non-dimensional delay R * tau
};

/// x^p for x >= 0 with fast paths for the common small integer exponents.
inline double pow_p(double x, double p) {
    if (p == 2.0) return x * x;
    if (p == 3.0) return x * x * x;
    return std::pow(x, p);
}

/// m = M/(R K^(p-1)), c = C/K^p, d = D K/R, e = E/R, a = A/K, varrho = R tau.
Nondimensionalized nondimensionalize(const DimensionalParams& dp);

/// Algebraic inverse of nondimensionalize for given scales R, K.
DimensionalParams dimensionalize(const ModelParams& mp, double varrho, double R, double K);

/// Predation rate F(x) = m x / (x^p + c).
inline double functional_response(double x, const ModelParams& mp) {
    return mp.m * x / (pow_p(x, mp.p) + mp.c);
}

/// Analytic location of the response maximum, (c/(p-1))^(1/p).
inline double functional_response_peak(const ModelParams& mp) {
    return std::pow(mp.c / (mp.p - 1.0), 1.0 / mp.p);
}

/// Scans F on an n-point grid over (0, x_max] and checks the group-defence
/// axioms. p <= 1 is rejected up front (the response is monotone there).
GroupDefenceReport group_defence_axioms(const ModelParams& mp, double x_max, int n);

/// Interior equilibrium, or absent when 0 < e/d - a < 1 fails.
std::optional<Equilibrium> equilibrium(const ModelParams& mp);

/// Time derivative of the (optionally controlled) system. delayed_x is the
/// prey density at t - varrho; with gain u != 0 the feedback terms
/// -u (x - x*), -u (y - y*) steer toward the target equilibrium.
inline State rhs(const State& s, double delayed_x, const ModelParams& mp,
                 double u = 0.0, const std::optional<Equilibrium>& target = std::nullopt) {
    double dx = s.x * (1.0 - delayed_x) - mp.m * s.x * s.y / (pow_p(s.x, mp.p) + mp.c);
    double dy = (mp.d - mp.e / (s.x + mp.a)) * s.y * s.y;
    if (u != 0.0) {
        const Equilibrium& t = target.value();  // throws when the target is missing
        dx -= u * (s.x - t.x_star);
        dy -= u * (s.y - t.y_star);
    }
    return {dx, dy};
}

/// Evaluates the boundedness conditions at the interior equilibrium.
/// Throws std::invalid_argument when the equilibrium is infeasible.
BoundednessReport boundedness_check(const ModelParams& mp);

}  // namespace herdbif
