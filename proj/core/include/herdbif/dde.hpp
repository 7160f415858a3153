#pragma once

#include <optional>
#include <vector>

#include "herdbif/model.hpp"

namespace herdbif {

/// Initial history on [-varrho, 0]: either a constant state or a sampled
/// curve (piecewise linear between samples). Values must be strictly positive.
class History {
public:
    static History constant(State s);
    static History sampled(std::vector<double> times, std::vector<State> states);

    State eval(double theta) const;
    bool is_constant() const { return kind_ == Kind::Constant; }
    bool strictly_positive() const;
    /// true when the definition covers [-varrho, 0]
    bool covers(double varrho) const;

    const State& constant_value() const { return value_; }
    const std::vector<double>& sample_times() const { return times_; }
    const std::vector<State>& sample_states() const { return states_; }

private:
    enum class Kind { Constant, Sampled };
    History() = default;

    Kind kind_ = Kind::Constant;
    State value_{};
    std::vector<double> times_;
    std::vector<State> states_;
};

/// Integration settings. h == 0 selects the default step min(varrho/20, 0.01)
/// (0.01 when varrho == 0). The default horizon leaves the weakly damped
/// spirals of this model enough room to drop below steady_tol inside the
/// classification tail.
struct SimOptions {
    double h = 0.0;
    double horizon = 3000.0;
    double tail_fraction = 0.25;
    double steady_tol = 1e-4;

    double resolve_h(double varrho) const;
};

/// Uniform-step solution samples with stored derivatives so the delayed
/// argument can be read back by cubic Hermite interpolation.
struct Trajectory {
    double h = 0.0;
    double varrho = 0.0;
    std::vector<double> times;
    std::vector<State> states;
    std::vector<State> derivs;

    /// Dense output at t in [0, duration()]; clamped at the ends.
    State eval(double t) const;
    double duration() const { return times.empty() ? 0.0 : times.back(); }
};

enum class OutcomeClass { Steady, Periodic, BistableCandidate, Diverged, Undetermined };

const char* to_string(OutcomeClass c);

/// Long-run classification of one trajectory.
struct Outcome {
    OutcomeClass cls = OutcomeClass::Undetermined;
    double amplitude = 0.0;  ///< tail peak-to-peak of x
    double period = 0.0;     ///< median maxima spacing; > 0 only when Periodic
    State final_state{};
};

/// Integrates the delayed system (controlled when u != 0) with classical
/// fixed-step RK4. The delayed prey value is read from the stored past via
/// cubic Hermite interpolation, also at the internal stage times.
/// varrho == 0 degenerates to a plain ODE step with delayed_x = current x.
///
/// Throws std::invalid_argument on precondition violations,
/// NonPositiveState when a component falls below -1e-9, NonFinite on overflow.
Trajectory simulate(const ModelParams& mp, const History& history, double varrho,
                    double u, const std::optional<Equilibrium>& target,
                    const SimOptions& opt);

/// Classifies a trajectory from the peak-to-peak amplitude of x over the
/// trailing window: Steady below steady_tol, otherwise Periodic with the
/// period estimated from successive maxima spacings (median), Diverged when
/// any state exceeds 1e6, Undetermined when the spacings scatter by more
/// than 20% of their median (or no maxima are found).
Outcome classify(const Trajectory& traj, double tail_fraction, double steady_tol);

inline Outcome classify(const Trajectory& traj, const SimOptions& opt) {
    return classify(traj, opt.tail_fraction, opt.steady_tol);
}

/// Bisects the delay between a Steady lower end and a Periodic upper end
/// until the bracket width is at most tol; returns the midpoint.
/// Throws InvalidBracket when the endpoints do not straddle the transition.
double critical_delay_by_simulation(const ModelParams& mp, const History& history,
                                    double varrho_lo, double varrho_hi, double tol,
                                    double u, const std::optional<Equilibrium>& target,
                                    const SimOptions& opt);

}  // namespace herdbif
