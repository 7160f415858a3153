#include "herdbif/dde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "herdbif/errors.hpp"

namespace herdbif {

History History::constant(State s) {
    History h;
    h.kind_ = Kind::Constant;
    h.value_ = s;
    return h;
}

History History::sampled(std::vector<double> times, std::vector<State> states) {
    if (times.size() < 2 || times.size() != states.size()) {
        throw std::invalid_argument("sampled history needs matching times/states, at least 2 samples");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw std::invalid_argument("sampled history times must be strictly increasing");
        }
    }
    if (!(times.back() == 0.0)) {
        throw std::invalid_argument("sampled history must end at theta = 0");
    }
    History h;
    h.kind_ = Kind::Sampled;
    h.times_ = std::move(times);
    h.states_ = std::move(states);
    return h;
}

State History::eval(double theta) const {
    if (kind_ == Kind::Constant) return value_;
    if (theta <= times_.front()) return states_.front();
    if (theta >= times_.back()) return states_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), theta);
    const std::size_t i = static_cast<std::size_t>(it - times_.begin());
    const double w = (theta - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return {states_[i - 1].x + w * (states_[i].x - states_[i - 1].x),
            states_[i - 1].y + w * (states_[i].y - states_[i - 1].y)};
}

bool History::strictly_positive() const {
    if (kind_ == Kind::Constant) return value_.x > 0.0 && value_.y > 0.0;
    return std::all_of(states_.begin(), states_.end(),
                       [](const State& s) { return s.x > 0.0 && s.y > 0.0; });
}

bool History::covers(double varrho) const {
    if (kind_ == Kind::Constant) return true;
    return times_.front() <= -varrho;
}

double SimOptions::resolve_h(double varrho) const {
    if (h > 0.0) return h;
    if (varrho > 0.0) return std::min(varrho / 20.0, 0.01);
    return 0.01;
}

namespace {

// Cubic Hermite value on one step [t0, t0 + h].
inline double hermite(double w, double h, double y0, double d0, double y1, double d1) {
    const double w2 = w * w;
    const double w3 = w2 * w;
    return (2.0 * w3 - 3.0 * w2 + 1.0) * y0 + (w3 - 2.0 * w2 + w) * h * d0 +
           (-2.0 * w3 + 3.0 * w2) * y1 + (w3 - w2) * h * d1;
}

}  // namespace

State Trajectory::eval(double t) const {
    if (times.empty()) throw std::invalid_argument("empty trajectory");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    std::size_t k = static_cast<std::size_t>(t / h);
    if (k >= times.size() - 1) k = times.size() - 2;
    if (t < times[k] && k > 0) --k;  // guard against rounding at step edges
    const double w = (t - times[k]) / h;
    return {hermite(w, h, states[k].x, derivs[k].x, states[k + 1].x, derivs[k + 1].x),
            hermite(w, h, states[k].y, derivs[k].y, states[k + 1].y, derivs[k + 1].y)};
}

const char* to_string(OutcomeClass c) {
    switch (c) {
        case OutcomeClass::Steady: return "Steady";
        case OutcomeClass::Periodic: return "Periodic";
        case OutcomeClass::BistableCandidate: return "Bistable-candidate";
        case OutcomeClass::Diverged: return "Diverged";
        case OutcomeClass::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

Trajectory simulate(const ModelParams& mp, const History& history, double varrho,
                    double u, const std::optional<Equilibrium>& target,
                    const SimOptions& opt) {
    mp.validate();
    if (!(varrho >= 0.0)) throw std::invalid_argument("varrho must be >= 0");
    if (!(opt.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    const double h = opt.resolve_h(varrho);
    if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
    if (varrho > 0.0 && h > varrho / 10.0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("step must satisfy h <= varrho/10");
    }
    if (!history.strictly_positive()) {
        throw std::invalid_argument("history must be strictly positive on [-varrho, 0]");
    }
    if (!history.covers(varrho)) {
        throw std::invalid_argument("sampled history does not cover [-varrho, 0]");
    }
    if (u != 0.0 && !target) {
        throw std::invalid_argument("control gain needs a target equilibrium");
    }

    const std::size_t n = static_cast<std::size_t>(std::ceil(opt.horizon / h - 1e-9));
    Trajectory traj;
    traj.h = h;
    traj.varrho = varrho;
    traj.times.reserve(n + 1);
    traj.states.reserve(n + 1);
    traj.derivs.reserve(n + 1);

    // Delayed prey value: from the history for s <= 0, otherwise Hermite
    // interpolation on completed steps (stages only look back >= 9h).
    auto delayed_x = [&](double s) -> double {
        if (s <= 0.0) return history.eval(s).x;
        std::size_t k = static_cast<std::size_t>(s / h);
        if (k + 1 >= traj.times.size()) k = traj.times.size() - 2;
        if (s < traj.times[k] && k > 0) --k;
        const double w = (s - traj.times[k]) / h;
        return hermite(w, h, traj.states[k].x, traj.derivs[k].x,
                       traj.states[k + 1].x, traj.derivs[k + 1].x);
    };
    auto stage_rhs = [&](double ts, const State& s) -> State {
        const double xd = varrho == 0.0 ? s.x : delayed_x(ts - varrho);
        return rhs(s, xd, mp, u, target);
    };

    State cur = history.eval(0.0);
    State dcur = stage_rhs(0.0, cur);
    traj.times.push_back(0.0);
    traj.states.push_back(cur);
    traj.derivs.push_back(dcur);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * h;
        const State k1 = dcur;  // rhs at the node, stored on the previous step
        const State s2{cur.x + 0.5 * h * k1.x, cur.y + 0.5 * h * k1.y};
        const State k2 = stage_rhs(t + 0.5 * h, s2);
        const State s3{cur.x + 0.5 * h * k2.x, cur.y + 0.5 * h * k2.y};
        const State k3 = stage_rhs(t + 0.5 * h, s3);
        const State s4{cur.x + h * k3.x, cur.y + h * k3.y};
        const State k4 = stage_rhs(t + h, s4);

        State next{cur.x + h / 6.0 * (k1.x + 2.0 * (k2.x + k3.x) + k4.x),
                   cur.y + h / 6.0 * (k1.y + 2.0 * (k2.y + k3.y) + k4.y)};
        const double t1 = static_cast<double>(i + 1) * h;
        if (!std::isfinite(next.x) || !std::isfinite(next.y)) {
            throw NonFinite("state overflow at t = " + std::to_string(t1));
        }
        if (next.x < -1e-9 || next.y < -1e-9) {
            throw NonPositiveState("state fell below -1e-9 at t = " + std::to_string(t1) +
                                   " (x = " + std::to_string(next.x) +
                                   ", y = " + std::to_string(next.y) + "); retry with h/2");
        }
        // Round-off undershoot within tolerance is pinned to zero.
        if (next.x < 0.0) next.x = 0.0;
        if (next.y < 0.0) next.y = 0.0;

        traj.times.push_back(t1);
        traj.states.push_back(next);
        cur = next;
        dcur = stage_rhs(t1, cur);
        traj.derivs.push_back(dcur);
    }
    return traj;
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Outcome classify(const Trajectory& traj, double tail_fraction, double steady_tol) {
    if (!(tail_fraction > 0.0) || !(tail_fraction < 1.0)) {
        throw std::invalid_argument("tail_fraction must lie in (0, 1)");
    }
    if (traj.times.size() < 2) throw std::invalid_argument("trajectory too short to classify");
    if (traj.varrho > 0.0 && traj.duration() <= 10.0 * traj.varrho) {
        throw std::invalid_argument("trajectory too short: need more than 10 delay intervals");
    }

    Outcome out;
    out.final_state = traj.states.back();

    for (const State& s : traj.states) {
        if (std::abs(s.x) > 1e6 || std::abs(s.y) > 1e6) {
            out.cls = OutcomeClass::Diverged;
            return out;
        }
    }

    const double t_tail = traj.duration() * (1.0 - tail_fraction);
    std::size_t i0 = static_cast<std::size_t>(t_tail / traj.h);
    if (i0 >= traj.times.size()) i0 = traj.times.size() - 1;
    if (traj.times.size() - i0 < 16) {
        throw std::invalid_argument("trajectory too short: tail window under 16 samples");
    }

    double lo = traj.states[i0].x;
    double hi = lo;
    for (std::size_t i = i0; i < traj.states.size(); ++i) {
        lo = std::min(lo, traj.states[i].x);
        hi = std::max(hi, traj.states[i].x);
    }
    out.amplitude = hi - lo;
    if (out.amplitude < steady_tol) {
        out.cls = OutcomeClass::Steady;
        return out;
    }

    // Local maxima of x over the tail, refined by parabolic interpolation.
    std::vector<double> peaks;
    for (std::size_t i = std::max<std::size_t>(i0, 1); i + 1 < traj.states.size(); ++i) {
        const double xm = traj.states[i - 1].x;
        const double x0 = traj.states[i].x;
        const double xp = traj.states[i + 1].x;
        if (xm < x0 && x0 >= xp) {
            const double den = xm - 2.0 * x0 + xp;
            const double off = std::abs(den) > 1e-300 ? 0.5 * (xm - xp) / den : 0.0;
            peaks.push_back(traj.times[i] + off * traj.h);
        }
    }
    if (peaks.size() < 2) {
        out.cls = OutcomeClass::Undetermined;
        return out;
    }
    std::vector<double> gaps(peaks.size() - 1);
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) gaps[i] = peaks[i + 1] - peaks[i];
    const double med = median_of(gaps);
    double var = 0.0;
    for (double g : gaps) var += (g - med) * (g - med);
    const double sdev = std::sqrt(var / static_cast<double>(gaps.size()));
    if (med <= 0.0 || sdev > 0.2 * med) {
        out.cls = OutcomeClass::Undetermined;
        return out;
    }
    out.cls = OutcomeClass::Periodic;
    out.period = med;
    return out;
}

double critical_delay_by_simulation(const ModelParams& mp, const History& history,
                                    double varrho_lo, double varrho_hi, double tol,
                                    double u, const std::optional<Equilibrium>& target,
                                    const SimOptions& opt) {
    if (!(varrho_lo >= 0.0) || !(varrho_hi > varrho_lo)) {
        throw std::invalid_argument("need 0 <= varrho_lo < varrho_hi");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

    auto cls_at = [&](double r) {
        const Trajectory traj = simulate(mp, history, r, u, target, opt);
        return classify(traj, opt.tail_fraction, opt.steady_tol).cls;
    };
    const OutcomeClass c_lo = cls_at(varrho_lo);
    const OutcomeClass c_hi = cls_at(varrho_hi);
    if (c_lo != OutcomeClass::Steady || c_hi != OutcomeClass::Periodic) {
        throw InvalidBracket(std::string("expected Steady at varrho_lo and Periodic at varrho_hi, got ") +
                             to_string(c_lo) + " / " + to_string(c_hi));
    }
    double lo = varrho_lo;
    double hi = varrho_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        // Non-steady midpoints (including Undetermined transients) move the
        // oscillatory end down.
        if (cls_at(mid) == OutcomeClass::Steady) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace herdbif
