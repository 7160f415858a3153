#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "herdbif/model.hpp"

namespace herdbif {

/// Jacobian data at the interior equilibrium, split into the instantaneous
/// part and the coefficient of the delayed prey term.
///
/// a22_paper keeps the published value d y*^2 / e used by the printed
/// stability conditions; the dynamics themselves have a21 = d^2 y*^2 / e and
/// a zero predator self-term (verified against finite differences).
struct Linearization {
    double a11 = 0.0;          ///< instantaneous prey self-term, m p x*^p y* / (x*^p + c)^2
    double a12 = 0.0;          ///< prey-predator term -m x* / (x*^p + c), < 0
    double a21 = 0.0;          ///< predator-prey term d^2 y*^2 / e, > 0
    double delay_coeff = 0.0;  ///< delayed prey self-term, -x*
    double a22_paper = 0.0;    ///< d y*^2 / e, kept for the published condition forms
    double x_star = 0.0;
    double y_star = 0.0;
};

enum class CoeffSource { Derived, PaperSection5 };

/// Coefficients of the characteristic quasi-polynomial
///   H(s) = s^2 + p1 s + p2 + e^(-s varrho) (q1 s + q2).
struct CharacteristicCoeffs {
    double p1 = 0.0;
    double p2 = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
    CoeffSource source = CoeffSource::Derived;
};

/// Imaginary-axis crossing of the characteristic function: frequency omega0,
/// phase theta in [0, 2pi), and the critical-delay ladder
/// rho[n] = (theta + 2 n pi) / omega0.
struct CrossingSet {
    bool exists = false;
    double omega0 = 0.0;
    double theta = 0.0;
    std::vector<double> rho;
    int transversal = 0;  ///< sign of d(Re lambda)/d(varrho) at the first crossing
    /// the published sign condition omega0^2 > a11 * a22, reported for
    /// comparison when the crossing was computed from a Linearization
    std::optional<bool> paper_sign_condition;
};

/// The printed delay-dependent sufficient stability conditions:
/// varrho > pi0 and pi1 varrho^2 + pi2 varrho + pi3 > 0.
/// This is a sufficient-condition check only, evaluated exactly as printed
/// (with a22 = d y*^2/e); see the tests for an empirical counterexample, so
/// the verdict must not be treated as decisive.
struct LyapunovReport {
    double varrho = 0.0;
    double pi0 = 0.0;
    double pi1 = 0.0;
    double pi2 = 0.0;
    double pi3 = 0.0;
    bool pi0_defined = false;  ///< false when the pi0 denominator vanishes
    bool cond_a = false;       ///< varrho > pi0
    bool cond_b = false;       ///< pi1 varrho^2 + pi2 varrho + pi3 > 0
    bool verdict = false;      ///< both conditions (false when pi0 is undefined)
};

/// Delay-length bound eta+ and rho+ computed from the characteristic
/// coefficients. valid is false when the discriminant is negative or q2 = 0
/// (the derivation divides by q2); values are still reported when computable.
struct DelayBoundReport {
    std::optional<double> eta_plus;
    std::optional<double> rho_plus;
    bool valid = false;
    std::string reason;  ///< why invalid; empty otherwise
    CharacteristicCoeffs coeffs;
};

/// Analytic Jacobian entries at the equilibrium, cross-checked against
/// central finite differences of rhs (throws Error above 1e-4 relative).
Linearization linearize(const ModelParams& mp, const Equilibrium& eq);

/// Coefficients derived from the validated Jacobian: p1 = -a11,
/// p2 = -a12 a21, q1 = x*, q2 = 0.
CharacteristicCoeffs derived_coeffs(const Linearization& lin);

/// The published section-5 forms, kept for comparison output only:
/// p2 = a11 a22_paper, q2 = -x* a12.
CharacteristicCoeffs paper_section5_coeffs(const Linearization& lin);

/// Controlled-system coefficients: p1 = 2u - a11, p2 = -a12 a21 + u^2 - a11 u,
/// q1 = x*, q2 = u x*. Reduces to derived_coeffs at u = 0.
CharacteristicCoeffs controlled_coeffs(const Linearization& lin, double u);

std::complex<double> characteristic(std::complex<double> lambda, double varrho,
                                    const CharacteristicCoeffs& k);

/// Controlled characteristic function H(lambda) built from (lin, u).
std::complex<double> characteristic(std::complex<double> lambda, double varrho,
                                    double u, const Linearization& lin);

/// Imaginary-axis crossings of the controlled characteristic function.
/// u = 0 solves the phase/frequency equations in closed form per sin-sign
/// branch; u != 0 runs the grid-seeded damped-Newton search of
/// crossings_for_coeffs. exists = false signals delay-independent behavior.
CrossingSet imaginary_crossings(const Linearization& lin, double u, int n_max);

/// Crossing search on arbitrary coefficients: 200-point omega grid over
/// (0, 10|p1| + 10], damped Newton on the magnitude-matching residual,
/// smallest-delay crossing returned with its ladder.
CrossingSet crossings_for_coeffs(const CharacteristicCoeffs& k, int n_max);

/// Routh-Hurwitz verdict for the varrho = 0 quadratic of the controlled
/// system: a1 + b1 > 0 and a2 + b2 > 0.
bool stability_nodelay(const Linearization& lin, double u);

/// Smallest positive root of Re H(i omega) = 0 for the controlled system,
/// by sign scan plus bisection, with Im H evaluated there.
struct ReRootProbe {
    double omega0 = 0.0;
    double im_h = 0.0;
};
std::optional<ReRootProbe> control_re_root(const Linearization& lin, double u, double varrho);

/// Nyquist-style sufficient stability test at delay varrho > 0: finds the
/// smallest positive root omega0 of Re H(i omega) = 0 (sign scan plus
/// bisection) and returns Im H(i omega0) > 0; stable when no root exists.
bool control_stability_delay(const Linearization& lin, double u, double varrho);

/// Bisects the control gain between an unstable u_lo and a stable u_hi
/// (stability_nodelay at varrho = 0, control_stability_delay otherwise).
double min_stabilizing_u(const Linearization& lin, double varrho,
                         double u_lo, double u_hi, double tol);

LyapunovReport lyapunov_conditions(const Linearization& lin, double varrho);

DelayBoundReport delay_bound(const CharacteristicCoeffs& k);

}  // namespace herdbif
