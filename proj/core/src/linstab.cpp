#include "herdbif/linstab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "herdbif/errors.hpp"

namespace herdbif {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double fd_step(double base) { return 1e-6 * std::max(1.0, std::abs(base)); }

// Central difference with a positive-side fallback when the lower evaluation
// point would leave the domain.
template <typename F>
double central_diff(F&& f, double at, double floor_value) {
    const double d = fd_step(at);
    if (at - d > floor_value) {
        return (f(at + d) - f(at - d)) / (2.0 * d);
    }
    return (f(at + d) - f(at)) / d;
}

void check_entry(double analytic, double fd, const char* name) {
    const double scale = std::max(1.0, std::abs(analytic));
    if (std::abs(analytic - fd) > 1e-4 * scale) {
        throw Error(std::string("linearize: analytic entry ") + name +
                    " disagrees with finite differences (" + std::to_string(analytic) +
                    " vs " + std::to_string(fd) + ")");
    }
}

}  // namespace

Linearization linearize(const ModelParams& mp, const Equilibrium& eq) {
    if (!eq.feasible) throw std::invalid_argument("linearize needs a feasible equilibrium");
    const double xs = eq.x_star;
    const double ys = eq.y_star;
    const double xp = pow_p(xs, mp.p);
    const double den = xp + mp.c;

    Linearization lin;
    lin.a11 = mp.m * mp.p * xp * ys / (den * den);
    lin.a12 = -mp.m * xs / den;
    lin.a21 = mp.d * mp.d * ys * ys / mp.e;
    lin.delay_coeff = -xs;
    lin.a22_paper = mp.d * ys * ys / mp.e;
    lin.x_star = xs;
    lin.y_star = ys;

    // Cross-check every entry against central differences of the model rhs.
    auto fx = [&](double x) { return rhs({x, ys}, xs, mp).x; };
    auto fxd = [&](double xd) { return rhs({xs, ys}, xd, mp).x; };
    auto fy = [&](double y) { return rhs({xs, y}, xs, mp).x; };
    auto gx = [&](double x) { return rhs({x, ys}, xs, mp).y; };
    auto gy = [&](double y) { return rhs({xs, y}, xs, mp).y; };
    check_entry(lin.a11, central_diff(fx, xs, 0.0), "a11");
    check_entry(lin.delay_coeff, central_diff(fxd, xs, 0.0), "delay_coeff");
    check_entry(lin.a12, central_diff(fy, ys, 0.0), "a12");
    check_entry(lin.a21, central_diff(gx, xs, -mp.a), "a21");
    check_entry(0.0, central_diff(gy, ys, 0.0), "a22");
    return lin;
}

CharacteristicCoeffs derived_coeffs(const Linearization& lin) {
    return {-lin.a11, -lin.a12 * lin.a21, lin.x_star, 0.0, CoeffSource::Derived};
}

CharacteristicCoeffs paper_section5_coeffs(const Linearization& lin) {
    return {-lin.a11, lin.a11 * lin.a22_paper, lin.x_star, -lin.x_star * lin.a12,
            CoeffSource::PaperSection5};
}

CharacteristicCoeffs controlled_coeffs(const Linearization& lin, double u) {
    return {2.0 * u - lin.a11, -lin.a12 * lin.a21 + u * u - lin.a11 * u,
            lin.x_star, u * lin.x_star, CoeffSource::Derived};
}

std::complex<double> characteristic(std::complex<double> lambda, double varrho,
                                    const CharacteristicCoeffs& k) {
    return lambda * lambda + k.p1 * lambda + k.p2 +
           std::exp(-lambda * varrho) * (k.q1 * lambda + k.q2);
}

std::complex<double> characteristic(std::complex<double> lambda, double varrho,
                                    double u, const Linearization& lin) {
    return characteristic(lambda, varrho, controlled_coeffs(lin, u));
}

namespace {

// cos/sin of (omega varrho) solved linearly from Re H = Im H = 0:
//   q2 c + q1 w s = w^2 - p2
//   q1 w c - q2 s = -p1 w
struct PhasePair {
    double c;
    double s;
};

PhasePair phase_at(const CharacteristicCoeffs& k, double w) {
    const double den = k.q2 * k.q2 + k.q1 * k.q1 * w * w;
    if (!(den > 0.0)) throw Error("crossing phase undefined: q1 = q2 = 0");
    return {(k.q2 * (w * w - k.p2) - k.p1 * k.q1 * w * w) / den,
            (k.p1 * k.q2 * w + k.q1 * w * (w * w - k.p2)) / den};
}

double wrap_angle(double theta) {
    theta = std::fmod(theta, kTwoPi);
    return theta < 0.0 ? theta + kTwoPi : theta;
}

void fill_ladder(CrossingSet& cs, double omega, double theta, int n_max) {
    cs.exists = true;
    cs.omega0 = omega;
    cs.theta = theta;
    cs.rho.clear();
    for (int n = 0; n <= n_max; ++n) {
        cs.rho.push_back((theta + kTwoPi * static_cast<double>(n)) / omega);
    }
}

// Root of H(lambda, varrho) near seed by a damped complex Newton iteration.
std::complex<double> root_near(const CharacteristicCoeffs& k, double varrho,
                               std::complex<double> seed) {
    std::complex<double> lam = seed;
    for (int it = 0; it < 100; ++it) {
        const std::complex<double> f = characteristic(lam, varrho, k);
        if (std::abs(f) < 1e-13) break;
        const std::complex<double> ex = std::exp(-lam * varrho);
        const std::complex<double> df =
            2.0 * lam + k.p1 + ex * (k.q1 - varrho * (k.q1 * lam + k.q2));
        if (std::abs(df) < 1e-300) break;
        std::complex<double> step = f / df;
        // damping: never jump by more than half of |seed| + 1 at once
        const double cap = 0.5 * (std::abs(seed) + 1.0);
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        lam -= step;
    }
    return lam;
}

int transversality_sign(const CharacteristicCoeffs& k, double omega0, double rho0) {
    const double d = 1e-4;
    const double lo = std::max(rho0 - d, 0.0);
    const std::complex<double> seed{0.0, omega0};
    const double re_hi = root_near(k, rho0 + d, seed).real();
    const double re_lo = root_near(k, lo, seed).real();
    const double slope = (re_hi - re_lo) / (rho0 + d - lo);
    if (slope > 1e-10) return 1;
    if (slope < -1e-10) return -1;
    return 0;
}

// Magnitude-matching residual whose positive roots are the crossing
// frequencies: |i w stuff|^2 equality reduced to
//   G(w) = (w^2 - p2)^2 + p1^2 w^2 - q1^2 w^2 - q2^2.
double crossing_residual(const CharacteristicCoeffs& k, double w) {
    const double t = w * w - k.p2;
    return t * t + (k.p1 * k.p1 - k.q1 * k.q1) * w * w - k.q2 * k.q2;
}

double crossing_residual_deriv(const CharacteristicCoeffs& k, double w) {
    return 4.0 * w * (w * w - k.p2) + 2.0 * (k.p1 * k.p1 - k.q1 * k.q1) * w;
}

// Safeguarded damped Newton inside a sign-change bracket.
double refine_crossing(const CharacteristicCoeffs& k, double lo, double hi) {
    double flo = crossing_residual(k, lo);
    double w = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = crossing_residual(k, w);
        if (f == 0.0) return w;
        if ((f < 0.0) == (flo < 0.0)) {
            lo = w;
            flo = f;
        } else {
            hi = w;
        }
        const double df = crossing_residual_deriv(k, w);
        double next = df != 0.0 ? w - f / df : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - w) < 1e-15 * std::max(1.0, std::abs(w))) return next;
        w = next;
    }
    return w;
}

}  // namespace

CrossingSet crossings_for_coeffs(const CharacteristicCoeffs& k, int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    CrossingSet cs;
    const double wmax = 10.0 * std::abs(k.p1) + 10.0;
    const int grid = 200;

    double best_rho = -1.0;
    double best_w = 0.0;
    double best_theta = 0.0;
    double prev_w = wmax / grid * 1e-3;
    double prev_g = crossing_residual(k, prev_w);
    for (int i = 1; i <= grid; ++i) {
        const double w = wmax * static_cast<double>(i) / grid;
        const double g = crossing_residual(k, w);
        if ((prev_g < 0.0) != (g < 0.0) || g == 0.0) {
            const double w0 = refine_crossing(k, prev_w, w);
            const PhasePair ph = phase_at(k, w0);
            const double theta = wrap_angle(std::atan2(ph.s, ph.c));
            const double rho0 = theta / w0;
            if (best_rho < 0.0 || rho0 < best_rho) {
                best_rho = rho0;
                best_w = w0;
                best_theta = theta;
            }
        }
        prev_w = w;
        prev_g = g;
    }
    if (best_rho < 0.0) return cs;  // no crossing: delay-independent behavior
    fill_ladder(cs, best_w, best_theta, n_max);
    cs.transversal = transversality_sign(k, best_w, best_rho);
    return cs;
}

CrossingSet imaginary_crossings(const Linearization& lin, double u, int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    if (!(lin.x_star > 0.0)) throw std::invalid_argument("crossings need a feasible equilibrium");

    if (u != 0.0) {
        const CharacteristicCoeffs k = controlled_coeffs(lin, u);
        CrossingSet cs = crossings_for_coeffs(k, n_max);
        if (cs.exists) {
            cs.paper_sign_condition = cs.omega0 * cs.omega0 > lin.a11 * lin.a22_paper;
        }
        return cs;
    }

    CrossingSet cs;
    const double xs = lin.x_star;
    if (std::abs(lin.a11) >= xs) return cs;  // no real phase: cos(w rho) = a11/x*

    // Per sin-sign branch: w^2 -+ x* s w - P = 0 with P = -a12 a21 > 0,
    // s = sqrt(1 - (a11/x*)^2); each branch has exactly one positive root.
    const double cosw = lin.a11 / xs;
    const double s = std::sqrt(1.0 - cosw * cosw);
    const double P = -lin.a12 * lin.a21;
    if (!(P > 0.0)) throw Error("crossings: nonpositive constant term");
    const double disc = std::sqrt(xs * xs * s * s + 4.0 * P);
    const double w_pos = 0.5 * (xs * s + disc);
    const double w_neg = 0.5 * (-xs * s + disc);
    const double theta_pos = wrap_angle(std::atan2(s, cosw));
    const double theta_neg = kTwoPi - theta_pos;

    const double rho_pos = theta_pos / w_pos;
    const double rho_neg = theta_neg / w_neg;
    if (rho_pos <= rho_neg) {
        fill_ladder(cs, w_pos, theta_pos, n_max);
    } else {
        fill_ladder(cs, w_neg, theta_neg, n_max);
    }
    const CharacteristicCoeffs k = derived_coeffs(lin);
    cs.transversal = transversality_sign(k, cs.omega0, cs.rho.front());
    cs.paper_sign_condition = cs.omega0 * cs.omega0 > lin.a11 * lin.a22_paper;
    return cs;
}

bool stability_nodelay(const Linearization& lin, double u) {
    const CharacteristicCoeffs k = controlled_coeffs(lin, u);
    // At varrho = 0 the quadratic is s^2 + (p1 + q1) s + (p2 + q2).
    return k.p1 + k.q1 > 0.0 && k.p2 + k.q2 > 0.0;
}

std::optional<ReRootProbe> control_re_root(const Linearization& lin, double u, double varrho) {
    if (!(varrho > 0.0)) throw std::invalid_argument("control_re_root needs varrho > 0");
    const CharacteristicCoeffs k = controlled_coeffs(lin, u);

    auto re_h = [&](double w) {
        return -w * w + k.p2 + k.q2 * std::cos(w * varrho) + k.q1 * w * std::sin(w * varrho);
    };
    const double wmax =
        10.0 * (1.0 + std::abs(k.p1) + std::sqrt(std::abs(k.p2)) + k.q1 + std::abs(k.q2));
    const int grid = 2000;
    double prev_w = wmax / grid * 1e-6;
    double prev_f = re_h(prev_w);
    for (int i = 1; i <= grid; ++i) {
        const double w = wmax * static_cast<double>(i) / grid;
        const double f = re_h(w);
        if ((prev_f < 0.0) != (f < 0.0) || f == 0.0) {
            double lo = prev_w;
            double hi = w;
            double flo = prev_f;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = re_h(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
                if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
            }
            const double w0 = 0.5 * (lo + hi);
            const double im_h = k.p1 * w0 + k.q1 * w0 * std::cos(w0 * varrho) -
                                k.q2 * std::sin(w0 * varrho);
            return ReRootProbe{w0, im_h};
        }
        prev_w = w;
        prev_f = f;
    }
    return std::nullopt;  // Re H has no positive root
}

bool control_stability_delay(const Linearization& lin, double u, double varrho) {
    const auto probe = control_re_root(lin, u, varrho);
    return !probe || probe->im_h > 0.0;
}

double min_stabilizing_u(const Linearization& lin, double varrho,
                         double u_lo, double u_hi, double tol) {
    if (!(u_lo < u_hi)) throw std::invalid_argument("need u_lo < u_hi");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    auto stable = [&](double u) {
        return varrho == 0.0 ? stability_nodelay(lin, u)
                             : control_stability_delay(lin, u, varrho);
    };
    if (stable(u_lo)) throw InvalidBracket("u_lo is already stabilizing");
    if (!stable(u_hi)) throw InvalidBracket("u_hi does not stabilize");
    double lo = u_lo;
    double hi = u_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (stable(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

LyapunovReport lyapunov_conditions(const Linearization& lin, double varrho) {
    if (!(varrho >= 0.0)) throw std::invalid_argument("varrho must be >= 0");
    const double a11 = lin.a11;
    const double a12 = lin.a12;
    const double a22 = lin.a22_paper;
    const double xs = lin.x_star;

    LyapunovReport rep;
    rep.varrho = varrho;
    const double den = 2.0 * a12 * xs - a11 - a22;
    rep.pi0_defined = den != 0.0;
    rep.pi0 = rep.pi0_defined ? a12 * xs / den : 0.0;
    rep.pi1 = xs * (2.0 * a11 * a12 + 2.0 * a12 * a12 - 0.5 * a11 * a22 - 0.5 * a22 * a22);
    rep.pi2 = a11 * a12 * xs - a12 * a12 * xs - 4.0 * a11 * a12;
    rep.pi3 = a11 * a12 * (2.0 - xs) - 0.5 * a22 * xs * (a11 + a22);
    rep.cond_a = rep.pi0_defined && varrho > rep.pi0;
    rep.cond_b = rep.pi1 * varrho * varrho + rep.pi2 * varrho + rep.pi3 > 0.0;
    rep.verdict = rep.pi0_defined && rep.cond_a && rep.cond_b;
    return rep;
}

DelayBoundReport delay_bound(const CharacteristicCoeffs& k) {
    DelayBoundReport rep;
    rep.coeffs = k;
    const double disc = k.q1 * k.q1 + 4.0 * (k.p2 - std::abs(k.q2));
    if (disc >= 0.0) {
        const double eta = 0.5 * (std::abs(k.q1) + std::sqrt(disc));
        rep.eta_plus = eta;
        const double den = k.q1 * k.q1 * eta * eta + k.q2 * k.q2;
        if (den > 0.0) {
            rep.rho_plus = (k.q1 * (eta * eta - k.p2) + std::abs(k.p1 * k.q2)) / den;
        }
    }
    if (disc < 0.0) {
        rep.valid = false;
        rep.reason = "negative discriminant: q1^2 + 4(p2 - |q2|) < 0";
    } else if (k.q2 == 0.0) {
        rep.valid = false;
        rep.reason = "q2 = 0: the bound derivation divides by q2 and does not apply";
    } else {
        rep.valid = rep.eta_plus.has_value() && rep.rho_plus.has_value();
    }
    return rep;
}

}  // namespace herdbif
