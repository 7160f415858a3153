#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>

#include "herdbif/bifurcation.hpp"
#include "herdbif/dde.hpp"
#include "herdbif/linstab.hpp"
#include "herdbif/model.hpp"
#include "herdbif/sensitivity.hpp"

namespace herdbif {

using json = nlohmann::json;

/// Throws std::invalid_argument when j is not an object, misses one of the
/// required keys, or carries a key outside required + optional.
void check_keys(const json& j, const char* ctx,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional = {});

// JSON serialization (nlohmann ADL hooks).
void to_json(json& j, const ModelParams& v);
void from_json(const json& j, ModelParams& v);
void to_json(json& j, const DimensionalParams& v);
void from_json(const json& j, DimensionalParams& v);
void to_json(json& j, const State& v);
void from_json(const json& j, State& v);
void to_json(json& j, const Equilibrium& v);
void to_json(json& j, const BoundednessReport& v);
void to_json(json& j, const GroupDefenceReport& v);
void to_json(json& j, const History& v);
void from_json(const json& j, History& v);
void to_json(json& j, const Outcome& v);
void to_json(json& j, const Linearization& v);
void to_json(json& j, const CharacteristicCoeffs& v);
void to_json(json& j, const CrossingSet& v);
void to_json(json& j, const LyapunovReport& v);
void to_json(json& j, const DelayBoundReport& v);
void to_json(json& j, const HopfPoint& v);
void to_json(json& j, const LpcPoint& v);
void to_json(json& j, const SweepSample& v);
void to_json(json& j, const SweepResult& v);
void to_json(json& j, const PrccResult& v);

// CSV export: '.' decimal separator, ',' field separator, LF line endings,
// 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);  // t,x,y
void write_sweep_csv(std::ostream& os, const SweepResult& sw);
void write_prcc_csv(std::ostream& os, const PrccResult& pr);          // t,param,prcc
void write_lhs_csv(std::ostream& os, const LhsDesign& design);

/// One double formatted with 17 significant digits ("%.17g").
std::string format_sig17(double v);

}  // namespace herdbif
