#pragma once

#include <optional>
#include <string>
#include <vector>

#include "herdbif/dde.hpp"
#include "herdbif/linstab.hpp"
#include "herdbif/model.hpp"

namespace herdbif {

enum class ParamId { m, p, c, d, e, a };

const char* to_string(ParamId id);
ParamId param_id_from_string(const std::string& name);
double get_param(const ModelParams& mp, ParamId id);
void set_param(ModelParams& mp, ParamId id, double value);

/// Hopf point of the undelayed system: trace zero (a11 = x*) with positive
/// determinant. boundary marks points that coincide with the feasibility
/// edge x* -> 0, where the trace condition degenerates.
struct HopfPoint {
    ParamId param = ParamId::m;
    double value = 0.0;
    double omega = 0.0;  ///< sqrt(-a12 a21) at the point
    bool boundary = false;
};

/// Fold of cycles located by bisecting the Periodic/Steady flip of an
/// off-equilibrium initial history.
struct LpcPoint {
    ParamId param = ParamId::m;
    double value = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    State far_ic{};
};

struct SweepSample {
    double value = 0.0;
    std::optional<Equilibrium> eq;
    double eig_re = 0.0;  ///< dominant eigenvalue of the varrho = 0 Jacobian
    double eig_im = 0.0;
    Outcome near_outcome;
    Outcome far_outcome;
    double cycle_min = 0.0;  ///< tail extrema of x from the far-IC run
    double cycle_max = 0.0;
    bool bistable = false;   ///< near Steady while far Periodic
    bool simulated = false;  ///< false for infeasible samples
};

struct SweepResult {
    ParamId param = ParamId::m;
    std::vector<SweepSample> samples;
};

/// Scans g(theta) = a11(theta) - x*(theta) over the feasible sub-intervals of
/// [lo, hi] with n_seeds seed points, bisects each sign change to 1e-10 and
/// keeps roots with positive determinant. Feasibility edges with x* -> 0
/// inside the window are reported as boundary-flagged points.
std::vector<HopfPoint> hopf_nodelay(const ModelParams& base, ParamId param,
                                    double lo, double hi, int n_seeds);

/// Bisects the classification flip of the far initial history at varrho = 0
/// down to a bracket of width tol. Requires opt.horizon >= 5000 (convergence
/// near the fold is slow).
LpcPoint lpc_locate(const ModelParams& base, ParamId param, double lo, double hi,
                    const History& far_ic, double tol, const SimOptions& opt);

/// Per-sample equilibrium, varrho = 0 eigenvalues, and two classified
/// simulations (near/far initial histories). near_ic defaults to the
/// equilibrium with a 2% radial offset. Samples run in parallel (jobs = 0
/// selects the hardware default); results are ordered by index.
SweepResult sweep(const ModelParams& base, ParamId param, double lo, double hi,
                  int n, const std::optional<State>& near_ic, const State& far_ic,
                  const SimOptions& opt, unsigned jobs);

/// Critical-delay ladder for a fixed parameter set (delegates to
/// imaginary_crossings at u = 0).
CrossingSet hopf_delay_curve(const ModelParams& mp, int n_max);

}  // namespace herdbif
