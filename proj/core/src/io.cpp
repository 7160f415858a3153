#include "herdbif/io.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace herdbif {

std::string format_sig17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void check_keys(const json& j, const char* ctx,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional) {
    if (!j.is_object()) {
        throw std::invalid_argument(std::string(ctx) + ": expected a JSON object");
    }
    for (const auto& key : required) {
        if (!j.contains(key)) {
            throw std::invalid_argument(std::string(ctx) + ": missing key \"" + key + "\"");
        }
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(required.begin(), required.end(), key) == required.end() &&
            std::find(optional.begin(), optional.end(), key) == optional.end()) {
            throw std::invalid_argument(std::string(ctx) + ": unknown key \"" + key + "\"");
        }
    }
}

void to_json(json& j, const ModelParams& v) {
    j = json{{"m", v.m}, {"p", v.p}, {"c", v.c}, {"d", v.d}, {"e", v.e}, {"a", v.a}};
}

void from_json(const json& j, ModelParams& v) {
    check_keys(j, "params", {"m", "p", "c", "d", "e", "a"});
    j.at("m").get_to(v.m);
    j.at("p").get_to(v.p);
    j.at("c").get_to(v.c);
    j.at("d").get_to(v.d);
    j.at("e").get_to(v.e);
    j.at("a").get_to(v.a);
}

void to_json(json& j, const DimensionalParams& v) {
    j = json{{"R", v.R}, {"K", v.K}, {"M", v.M}, {"C", v.C}, {"D", v.D},
             {"E", v.E}, {"A", v.A}, {"p", v.p}, {"tau", v.tau}};
}

void from_json(const json& j, DimensionalParams& v) {
    check_keys(j, "dimensional_params", {"R", "K", "M", "C", "D", "E", "A", "p", "tau"});
    j.at("R").get_to(v.R);
    j.at("K").get_to(v.K);
    j.at("M").get_to(v.M);
    j.at("C").get_to(v.C);
    j.at("D").get_to(v.D);
    j.at("E").get_to(v.E);
    j.at("A").get_to(v.A);
    j.at("p").get_to(v.p);
    j.at("tau").get_to(v.tau);
}

void to_json(json& j, const State& v) { j = json{{"x", v.x}, {"y", v.y}}; }

void from_json(const json& j, State& v) {
    check_keys(j, "state", {"x", "y"});
    j.at("x").get_to(v.x);
    j.at("y").get_to(v.y);
}

void to_json(json& j, const Equilibrium& v) {
    j = json{{"x_star", v.x_star}, {"y_star", v.y_star}, {"feasible", v.feasible}};
}

void to_json(json& j, const BoundednessReport& v) {
    j = json{{"mu", v.mu},           {"cond1", v.cond1},     {"cond2", v.cond2},
             {"bound_x", v.bound_x}, {"bound_y", v.bound_y}};
}

void to_json(json& j, const GroupDefenceReport& v) {
    j = json{{"ok", v.ok},
             {"zero_at_origin", v.zero_at_origin},
             {"positive", v.positive},
             {"bounded", v.bounded},
             {"single_peak", v.single_peak},
             {"peak", v.peak},
             {"failure", v.failure}};
}

void to_json(json& j, const History& v) {
    if (v.is_constant()) {
        j = json{{"kind", "constant"}, {"x", v.constant_value().x}, {"y", v.constant_value().y}};
        return;
    }
    json xs = json::array();
    json ys = json::array();
    for (const State& s : v.sample_states()) {
        xs.push_back(s.x);
        ys.push_back(s.y);
    }
    j = json{{"kind", "sampled"}, {"times", v.sample_times()}, {"x", xs}, {"y", ys}};
}

void from_json(const json& j, History& v) {
    if (!j.is_object() || !j.contains("kind")) {
        throw std::invalid_argument("history: expected an object with a \"kind\" key");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        check_keys(j, "history", {"kind", "x", "y"});
        v = History::constant({j.at("x").get<double>(), j.at("y").get<double>()});
    } else if (kind == "sampled") {
        check_keys(j, "history", {"kind", "times", "x", "y"});
        const auto times = j.at("times").get<std::vector<double>>();
        const auto xs = j.at("x").get<std::vector<double>>();
        const auto ys = j.at("y").get<std::vector<double>>();
        if (xs.size() != times.size() || ys.size() != times.size()) {
            throw std::invalid_argument("history: times/x/y lengths differ");
        }
        std::vector<State> states(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) states[i] = {xs[i], ys[i]};
        v = History::sampled(times, states);
    } else {
        throw std::invalid_argument("history: kind must be \"constant\" or \"sampled\"");
    }
}

void to_json(json& j, const Outcome& v) {
    j = json{{"class", to_string(v.cls)},
             {"amplitude", v.amplitude},
             {"period", v.period},
             {"final_x", v.final_state.x},
             {"final_y", v.final_state.y}};
}

void to_json(json& j, const Linearization& v) {
    j = json{{"a11", v.a11},
             {"a12", v.a12},
             {"a21", v.a21},
             {"delay_coeff", v.delay_coeff},
             {"a22_paper", v.a22_paper},
             {"x_star", v.x_star},
             {"y_star", v.y_star}};
}

void to_json(json& j, const CharacteristicCoeffs& v) {
    j = json{{"p1", v.p1},
             {"p2", v.p2},
             {"q1", v.q1},
             {"q2", v.q2},
             {"source", v.source == CoeffSource::Derived ? "derived" : "paper-section-5"}};
}

void to_json(json& j, const CrossingSet& v) {
    j = json{{"exists", v.exists},
             {"omega0", v.omega0},
             {"theta", v.theta},
             {"rho", v.rho},
             {"transversal", v.transversal}};
    if (v.paper_sign_condition.has_value()) {
        j["paper_sign_condition"] = *v.paper_sign_condition;
    } else {
        j["paper_sign_condition"] = nullptr;
    }
}

void to_json(json& j, const LyapunovReport& v) {
    j = json{{"varrho", v.varrho},
             {"pi0", v.pi0},
             {"pi1", v.pi1},
             {"pi2", v.pi2},
             {"pi3", v.pi3},
             {"pi0_defined", v.pi0_defined},
             {"cond_a", v.cond_a},
             {"cond_b", v.cond_b},
             {"verdict", v.verdict}};
}

void to_json(json& j, const DelayBoundReport& v) {
    j = json{{"valid", v.valid}, {"reason", v.reason}, {"coeffs", v.coeffs}};
    j["eta_plus"] = v.eta_plus.has_value() ? json(*v.eta_plus) : json(nullptr);
    j["rho_plus"] = v.rho_plus.has_value() ? json(*v.rho_plus) : json(nullptr);
}

void to_json(json& j, const HopfPoint& v) {
    j = json{{"param", to_string(v.param)},
             {"value", v.value},
             {"omega", v.omega},
             {"boundary", v.boundary}};
}

void to_json(json& j, const LpcPoint& v) {
    j = json{{"param", to_string(v.param)},
             {"value", v.value},
             {"bracket_lo", v.bracket_lo},
             {"bracket_hi", v.bracket_hi},
             {"far_ic", json{{"x", v.far_ic.x}, {"y", v.far_ic.y}}}};
}

void to_json(json& j, const SweepSample& v) {
    j = json{{"value", v.value}, {"simulated", v.simulated}};
    if (v.eq) {
        j["equilibrium"] = *v.eq;
    } else {
        j["equilibrium"] = nullptr;
    }
    if (v.simulated) {
        j["eig_re"] = v.eig_re;
        j["eig_im"] = v.eig_im;
        j["near"] = v.near_outcome;
        j["far"] = v.far_outcome;
        j["cycle_min"] = v.cycle_min;
        j["cycle_max"] = v.cycle_max;
        j["bistable"] = v.bistable;
    }
}

void to_json(json& j, const SweepResult& v) {
    j = json{{"param", to_string(v.param)}, {"samples", v.samples}};
}

void to_json(json& j, const PrccResult& v) {
    j = json{{"output", to_string(v.output)},
             {"param_names", v.param_names},
             {"time_points", v.time_points},
             {"coefficients", v.coefficients},
             {"rows_used", v.rows_used},
             {"rows_dropped", v.rows_dropped}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,x,y\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_sig17(traj.times[i]) << ',' << format_sig17(traj.states[i].x) << ','
           << format_sig17(traj.states[i].y) << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sw) {
    os << "param,x_star,y_star,eig_re,eig_im,near_class,far_class,cycle_min,cycle_max\n";
    for (const SweepSample& s : sw.samples) {
        os << format_sig17(s.value) << ',';
        if (s.eq) {
            os << format_sig17(s.eq->x_star) << ',' << format_sig17(s.eq->y_star) << ',';
        } else {
            os << ",,";
        }
        if (s.simulated) {
            os << format_sig17(s.eig_re) << ',' << format_sig17(s.eig_im) << ','
               << to_string(s.near_outcome.cls) << ',' << to_string(s.far_outcome.cls) << ','
               << format_sig17(s.cycle_min) << ',' << format_sig17(s.cycle_max);
        } else {
            os << ",,infeasible,infeasible,,";
        }
        os << '\n';
    }
}

void write_prcc_csv(std::ostream& os, const PrccResult& pr) {
    os << "t,param,prcc\n";
    for (std::size_t t = 0; t < pr.time_points.size(); ++t) {
        for (std::size_t j = 0; j < pr.param_names.size(); ++j) {
            os << format_sig17(pr.time_points[t]) << ',' << pr.param_names[j] << ','
               << format_sig17(pr.coefficients[t][j]) << '\n';
        }
    }
}

void write_lhs_csv(std::ostream& os, const LhsDesign& design) {
    for (std::size_t j = 0; j < design.param_names.size(); ++j) {
        os << (j ? "," : "") << design.param_names[j];
    }
    os << '\n';
    for (const auto& row : design.matrix) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            os << (j ? "," : "") << format_sig17(row[j]);
        }
        os << '\n';
    }
}

}  // namespace herdbif
