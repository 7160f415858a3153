#include "herdbif/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "herdbif/errors.hpp"
#include "herdbif/parallel.hpp"

namespace herdbif {

const char* to_string(ParamId id) {
    switch (id) {
        case ParamId::m: return "m";
        case ParamId::p: return "p";
        case ParamId::c: return "c";
        case ParamId::d: return "d";
        case ParamId::e: return "e";
        case ParamId::a: return "a";
    }
    return "?";
}

ParamId param_id_from_string(const std::string& name) {
    if (name == "m") return ParamId::m;
    if (name == "p") return ParamId::p;
    if (name == "c") return ParamId::c;
    if (name == "d") return ParamId::d;
    if (name == "e") return ParamId::e;
    if (name == "a") return ParamId::a;
    throw std::invalid_argument("unknown parameter name: " + name);
}

double get_param(const ModelParams& mp, ParamId id) {
    switch (id) {
        case ParamId::m: return mp.m;
        case ParamId::p: return mp.p;
        case ParamId::c: return mp.c;
        case ParamId::d: return mp.d;
        case ParamId::e: return mp.e;
        case ParamId::a: return mp.a;
    }
    return 0.0;
}

void set_param(ModelParams& mp, ParamId id, double value) {
    switch (id) {
        case ParamId::m: mp.m = value; break;
        case ParamId::p: mp.p = value; break;
        case ParamId::c: mp.c = value; break;
        case ParamId::d: mp.d = value; break;
        case ParamId::e: mp.e = value; break;
        case ParamId::a: mp.a = value; break;
    }
}

namespace {

ModelParams with_param(const ModelParams& base, ParamId id, double value) {
    ModelParams mp = base;
    set_param(mp, id, value);
    return mp;
}

bool params_valid(const ModelParams& mp) {
    return mp.m > 0.0 && mp.c > 0.0 && mp.d > 0.0 && mp.e > 0.0 && mp.a > 0.0 && mp.p > 1.0;
}

// Jacobian entries without the finite-difference cross-check; used inside
// scan loops where linearize would be needlessly expensive.
struct LocalLin {
    double a11;
    double a12;
    double a21;
    double x_star;
};

LocalLin local_lin(const ModelParams& mp, const Equilibrium& eq) {
    const double xp = pow_p(eq.x_star, mp.p);
    const double den = xp + mp.c;
    return {mp.m * mp.p * xp * eq.y_star / (den * den),
            -mp.m * eq.x_star / den,
            mp.d * mp.d * eq.y_star * eq.y_star / mp.e,
            eq.x_star};
}

// Trace of the varrho = 0 Jacobian, or absent when the sample is infeasible.
std::optional<double> trace_at(const ModelParams& base, ParamId id, double v) {
    const ModelParams mp = with_param(base, id, v);
    if (!params_valid(mp)) return std::nullopt;
    const auto eq = equilibrium(mp);
    if (!eq) return std::nullopt;
    const LocalLin lin = local_lin(mp, *eq);
    return lin.a11 - lin.x_star;
}

double bisect_trace_root(const ModelParams& base, ParamId id, double lo, double hi,
                         double g_lo) {
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto g = trace_at(base, id, mid);
        if (!g) break;  // feasibility lost inside: stop at the current bracket
        if ((*g < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = *g;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Parameter value where feasibility flips between lo (feasible) and hi
// (infeasible), or the mirrored order.
double bisect_feasibility_edge(const ModelParams& base, ParamId id, double lo, double hi,
                               bool lo_feasible) {
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool f = trace_at(base, id, mid).has_value();
        if (f == lo_feasible) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double x_star_of(const ModelParams& base, ParamId id, double v) {
    const ModelParams mp = with_param(base, id, v);
    return mp.e / mp.d - mp.a;
}

}  // namespace

std::vector<HopfPoint> hopf_nodelay(const ModelParams& base, ParamId param,
                                    double lo, double hi, int n_seeds) {
    if (!(lo < hi)) throw std::invalid_argument("need lo < hi");
    if (n_seeds < 2) throw std::invalid_argument("need at least 2 seed points");

    std::vector<HopfPoint> points;
    std::vector<double> edges;  // feasibility edges inside the window

    double prev_v = lo;
    std::optional<double> prev_g = trace_at(base, param, lo);
    for (int i = 1; i < n_seeds; ++i) {
        const double v = lo + (hi - lo) * static_cast<double>(i) / (n_seeds - 1);
        const std::optional<double> g = trace_at(base, param, v);
        if (prev_g && g && ((*prev_g < 0.0) != (*g < 0.0) || *g == 0.0)) {
            const double root = bisect_trace_root(base, param, prev_v, v, *prev_g);
            const ModelParams mp = with_param(base, param, root);
            const auto eq = equilibrium(mp);
            if (eq) {
                const LocalLin lin = local_lin(mp, *eq);
                const double det = -lin.a12 * lin.a21;
                if (det > 0.0) {
                    points.push_back({param, root, std::sqrt(det), false});
                }
            }
        }
        if (prev_g.has_value() != g.has_value()) {
            edges.push_back(bisect_feasibility_edge(base, param, prev_v, v, prev_g.has_value()));
        }
        prev_v = v;
        prev_g = g;
    }

    // A feasibility edge where x* -> 0 is a degenerate trace root (a11 and x*
    // both vanish); report it as a boundary-flagged point.
    for (double edge : edges) {
        if (std::abs(x_star_of(base, param, edge)) < 1e-6) {
            // omega from just inside the feasible side
            double omega = 0.0;
            const double off = 1e-7 * std::max(1.0, std::abs(edge));
            for (double side : {edge - off, edge + off}) {
                const ModelParams mp = with_param(base, param, side);
                if (!params_valid(mp)) continue;
                const auto eq = equilibrium(mp);
                if (!eq) continue;
                const LocalLin lin = local_lin(mp, *eq);
                omega = std::sqrt(std::max(0.0, -lin.a12 * lin.a21));
            }
            points.push_back({param, edge, omega, true});
        }
    }

    // Interior roots that landed within 1e-6 of a feasibility edge are
    // boundary points as well.
    for (auto& pt : points) {
        if (pt.boundary) continue;
        for (double edge : edges) {
            if (std::abs(pt.value - edge) < 1e-6) pt.boundary = true;
        }
    }
    std::sort(points.begin(), points.end(),
              [](const HopfPoint& a, const HopfPoint& b) { return a.value < b.value; });
    return points;
}

namespace {

OutcomeClass classify_run(const ModelParams& mp, const History& ic, const SimOptions& opt,
                          Outcome* out = nullptr) {
    try {
        const Trajectory traj = simulate(mp, ic, 0.0, 0.0, std::nullopt, opt);
        const Outcome o = classify(traj, opt.tail_fraction, opt.steady_tol);
        if (out) *out = o;
        return o.cls;
    } catch (const Error&) {
        if (out) out->cls = OutcomeClass::Diverged;
        return OutcomeClass::Diverged;
    }
}

}  // namespace

LpcPoint lpc_locate(const ModelParams& base, ParamId param, double lo, double hi,
                    const History& far_ic, double tol, const SimOptions& opt) {
    if (!(lo < hi)) throw std::invalid_argument("need lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (opt.horizon < 5000.0) {
        throw std::invalid_argument("lpc_locate needs horizon >= 5000 (slow convergence near the fold)");
    }

    auto klass = [&](double v) {
        return classify_run(with_param(base, param, v), far_ic, opt);
    };
    const OutcomeClass c_lo = klass(lo);
    const OutcomeClass c_hi = klass(hi);
    const bool lo_per = c_lo == OutcomeClass::Periodic;
    const bool hi_per = c_hi == OutcomeClass::Periodic;
    const bool lo_st = c_lo == OutcomeClass::Steady;
    const bool hi_st = c_hi == OutcomeClass::Steady;
    if (!((lo_per && hi_st) || (lo_st && hi_per))) {
        throw InvalidBracket(std::string("far-IC classes do not flip Periodic/Steady: ") +
                             to_string(c_lo) + " / " + to_string(c_hi));
    }
    double a = lo;
    double b = hi;
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        // Non-steady midpoints (slow fold-side transients) count as the
        // oscillatory side.
        const bool mid_per = klass(mid) != OutcomeClass::Steady;
        if (mid_per == lo_per) {
            a = mid;
        } else {
            b = mid;
        }
    }

    LpcPoint pt;
    pt.param = param;
    pt.value = 0.5 * (a + b);
    pt.bracket_lo = a;
    pt.bracket_hi = b;
    pt.far_ic = far_ic.is_constant() ? far_ic.constant_value() : far_ic.eval(0.0);
    return pt;
}

SweepResult sweep(const ModelParams& base, ParamId param, double lo, double hi,
                  int n, const std::optional<State>& near_ic, const State& far_ic,
                  const SimOptions& opt, unsigned jobs) {
    if (n < 2) throw std::invalid_argument("need n >= 2 samples");
    if (!(lo < hi)) throw std::invalid_argument("need lo < hi");

    SweepResult result;
    result.param = param;
    result.samples.resize(static_cast<std::size_t>(n));

    parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
        SweepSample& s = result.samples[i];
        s.value = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        const ModelParams mp = with_param(base, param, s.value);
        if (!params_valid(mp)) return;
        s.eq = equilibrium(mp);
        if (!s.eq) return;

        const LocalLin lin = local_lin(mp, *s.eq);
        const double tr = lin.a11 - lin.x_star;
        const double det = -lin.a12 * lin.a21;
        const double disc = 0.25 * tr * tr - det;
        if (disc < 0.0) {
            s.eig_re = 0.5 * tr;
            s.eig_im = std::sqrt(-disc);
        } else {
            s.eig_re = 0.5 * tr + std::sqrt(disc);  // dominant real eigenvalue
            s.eig_im = 0.0;
        }

        const State near = near_ic.value_or(State{1.02 * s.eq->x_star, 1.02 * s.eq->y_star});
        classify_run(mp, History::constant(near), opt, &s.near_outcome);
        Trajectory far_traj;
        try {
            far_traj = simulate(mp, History::constant(far_ic), 0.0, 0.0, std::nullopt, opt);
            s.far_outcome = classify(far_traj, opt.tail_fraction, opt.steady_tol);
        } catch (const Error&) {
            s.far_outcome.cls = OutcomeClass::Diverged;
        }
        if (!far_traj.times.empty()) {
            const double t_tail = far_traj.duration() * (1.0 - opt.tail_fraction);
            double cmin = far_traj.states.back().x;
            double cmax = cmin;
            for (std::size_t j = 0; j < far_traj.states.size(); ++j) {
                if (far_traj.times[j] < t_tail) continue;
                cmin = std::min(cmin, far_traj.states[j].x);
                cmax = std::max(cmax, far_traj.states[j].x);
            }
            s.cycle_min = cmin;
            s.cycle_max = cmax;
        }
        s.bistable = s.near_outcome.cls == OutcomeClass::Steady &&
                     s.far_outcome.cls == OutcomeClass::Periodic;
        s.simulated = true;
    });
    return result;
}

CrossingSet hopf_delay_curve(const ModelParams& mp, int n_max) {
    const auto eq = equilibrium(mp);
    if (!eq) throw std::invalid_argument("hopf_delay_curve needs a feasible equilibrium");
    const Linearization lin = linearize(mp, *eq);
    return imaginary_crossings(lin, 0.0, n_max);
}

}  // namespace herdbif
