// herdbif: simulation and analysis CLI for a delayed predator-prey system
// with prey group defence and a modified Leslie-Gower generalist predator.
//
// Subcommands read a JSON config (strict keys), let flags override scalars,
// and emit CSV/JSON data files. Exit codes: 0 success, 1 usage/config error,
// 2 numerical failure.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "herdbif/bifurcation.hpp"
#include "herdbif/dde.hpp"
#include "herdbif/errors.hpp"
#include "herdbif/io.hpp"
#include "herdbif/linstab.hpp"
#include "herdbif/model.hpp"
#include "herdbif/parallel.hpp"
#include "herdbif/sensitivity.hpp"

namespace {

using herdbif::json;

struct HopfSection {
    std::string param;
    double lo = 0.0;
    double hi = 0.0;
    int seeds = 200;
};

struct LpcSection {
    std::string param;
    double lo = 0.0;
    double hi = 0.0;
    double tol = 1e-4;
    std::optional<herdbif::State> far_ic;
};

struct SweepSection {
    std::string param;
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    std::optional<herdbif::State> near_ic;
    std::optional<herdbif::State> far_ic;
};

struct ControlSection {
    double u_lo = 0.0;
    double u_hi = 1.0;
    double tol = 1e-4;
    double scan_lo = 0.0;
    double scan_hi = 0.2;
    int scan_points = 101;
};

struct PrccSection {
    int n = 200;
    double fraction = 0.25;
    std::vector<double> time_points;
    std::string output = "x";
};

struct RunConfig {
    std::optional<herdbif::ModelParams> params;
    double varrho = 0.0;
    double u = 0.0;
    std::uint64_t seed = 1;
    herdbif::History history = herdbif::History::constant({0.4, 0.3});
    herdbif::SimOptions sim;
    int n_max = 5;
    HopfSection hopf;
    LpcSection lpc;
    SweepSection sweep;
    ControlSection control;
    PrccSection prcc;
};

RunConfig parse_config(const json& j) {
    herdbif::check_keys(j, "config",
                        {},
                        {"params", "dimensional_params", "varrho", "u", "seed", "history", "sim",
                         "crossings", "hopf", "lpc", "sweep", "control", "prcc"});
    RunConfig cfg;
    if (j.contains("params") && j.contains("dimensional_params")) {
        throw std::invalid_argument("config: give either \"params\" or \"dimensional_params\", not both");
    }
    if (j.contains("params")) {
        cfg.params = j.at("params").get<herdbif::ModelParams>();
    } else if (j.contains("dimensional_params")) {
        const auto dp = j.at("dimensional_params").get<herdbif::DimensionalParams>();
        const auto nd = herdbif::nondimensionalize(dp);
        cfg.params = nd.params;
        cfg.varrho = nd.varrho;
    }
    if (j.contains("varrho")) cfg.varrho = j.at("varrho").get<double>();
    if (j.contains("u")) cfg.u = j.at("u").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("history")) cfg.history = j.at("history").get<herdbif::History>();
    if (j.contains("sim")) {
        const json& s = j.at("sim");
        herdbif::check_keys(s, "sim", {}, {"h", "horizon", "tail_fraction", "steady_tol"});
        if (s.contains("h")) cfg.sim.h = s.at("h").get<double>();
        if (s.contains("horizon")) cfg.sim.horizon = s.at("horizon").get<double>();
        if (s.contains("tail_fraction")) cfg.sim.tail_fraction = s.at("tail_fraction").get<double>();
        if (s.contains("steady_tol")) cfg.sim.steady_tol = s.at("steady_tol").get<double>();
    }
    if (j.contains("crossings")) {
        const json& s = j.at("crossings");
        herdbif::check_keys(s, "crossings", {}, {"n_max"});
        if (s.contains("n_max")) cfg.n_max = s.at("n_max").get<int>();
    }
    if (j.contains("hopf")) {
        const json& s = j.at("hopf");
        herdbif::check_keys(s, "hopf", {}, {"param", "lo", "hi", "seeds"});
        if (s.contains("param")) cfg.hopf.param = s.at("param").get<std::string>();
        if (s.contains("lo")) cfg.hopf.lo = s.at("lo").get<double>();
        if (s.contains("hi")) cfg.hopf.hi = s.at("hi").get<double>();
        if (s.contains("seeds")) cfg.hopf.seeds = s.at("seeds").get<int>();
    }
    if (j.contains("lpc")) {
        const json& s = j.at("lpc");
        herdbif::check_keys(s, "lpc", {}, {"param", "lo", "hi", "tol", "far_ic"});
        if (s.contains("param")) cfg.lpc.param = s.at("param").get<std::string>();
        if (s.contains("lo")) cfg.lpc.lo = s.at("lo").get<double>();
        if (s.contains("hi")) cfg.lpc.hi = s.at("hi").get<double>();
        if (s.contains("tol")) cfg.lpc.tol = s.at("tol").get<double>();
        if (s.contains("far_ic")) cfg.lpc.far_ic = s.at("far_ic").get<herdbif::State>();
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        herdbif::check_keys(s, "sweep", {}, {"param", "lo", "hi", "n", "near_ic", "far_ic"});
        if (s.contains("param")) cfg.sweep.param = s.at("param").get<std::string>();
        if (s.contains("lo")) cfg.sweep.lo = s.at("lo").get<double>();
        if (s.contains("hi")) cfg.sweep.hi = s.at("hi").get<double>();
        if (s.contains("n")) cfg.sweep.n = s.at("n").get<int>();
        if (s.contains("near_ic")) cfg.sweep.near_ic = s.at("near_ic").get<herdbif::State>();
        if (s.contains("far_ic")) cfg.sweep.far_ic = s.at("far_ic").get<herdbif::State>();
    }
    if (j.contains("control")) {
        const json& s = j.at("control");
        herdbif::check_keys(s, "control", {},
                            {"u_lo", "u_hi", "tol", "scan_lo", "scan_hi", "scan_points"});
        if (s.contains("u_lo")) cfg.control.u_lo = s.at("u_lo").get<double>();
        if (s.contains("u_hi")) cfg.control.u_hi = s.at("u_hi").get<double>();
        if (s.contains("tol")) cfg.control.tol = s.at("tol").get<double>();
        if (s.contains("scan_lo")) cfg.control.scan_lo = s.at("scan_lo").get<double>();
        if (s.contains("scan_hi")) cfg.control.scan_hi = s.at("scan_hi").get<double>();
        if (s.contains("scan_points")) cfg.control.scan_points = s.at("scan_points").get<int>();
    }
    if (j.contains("prcc")) {
        const json& s = j.at("prcc");
        herdbif::check_keys(s, "prcc", {}, {"n", "fraction", "time_points", "output"});
        if (s.contains("n")) cfg.prcc.n = s.at("n").get<int>();
        if (s.contains("fraction")) cfg.prcc.fraction = s.at("fraction").get<double>();
        if (s.contains("time_points")) {
            cfg.prcc.time_points = s.at("time_points").get<std::vector<double>>();
        }
        if (s.contains("output")) cfg.prcc.output = s.at("output").get<std::string>();
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    if (path.empty()) return RunConfig{};
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);  // parse errors carry line/column positions
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return parse_config(j);
}

const herdbif::ModelParams& need_params(const RunConfig& cfg) {
    if (!cfg.params) {
        throw std::invalid_argument("config must provide \"params\" or \"dimensional_params\"");
    }
    return *cfg.params;
}

herdbif::Equilibrium need_equilibrium(const herdbif::ModelParams& mp) {
    const auto eq = herdbif::equilibrium(mp);
    if (!eq) {
        throw std::invalid_argument("no feasible interior equilibrium for these parameters");
    }
    return *eq;
}

void emit_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    out << text;
}

void emit_json(const std::string& path, const json& j) { emit_text(path, j.dump(2) + "\n"); }

herdbif::State parse_ic(const std::vector<double>& v, const char* flag) {
    if (v.size() != 2) throw std::invalid_argument(std::string(flag) + " needs exactly two values");
    return {v[0], v[1]};
}

herdbif::ParamId need_param_id(const std::string& name, const char* ctx) {
    if (name.empty()) {
        throw std::invalid_argument(std::string(ctx) + ": parameter name missing (config or --param)");
    }
    return herdbif::param_id_from_string(name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delayed predator-prey simulation, stability and bifurcation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path = "-";
    std::string csv_path;
    std::string json_path;
    unsigned jobs = 0;
    bool paper_mode = false;

    // flag overrides (presence-checked against the config)
    double f_varrho = 0.0, f_u = 0.0, f_h = 0.0, f_horizon = 0.0, f_tail = 0.0, f_tol = 0.0;
    double f_lo = 0.0, f_hi = 0.0, f_steady_tol = 0.0, f_fraction = 0.0;
    double f_ulo = 0.0, f_uhi = 0.0;
    std::uint64_t f_seed = 0;
    int f_n = 0, f_seeds = 0, f_nmax = 0;
    std::string f_param, f_output;
    std::vector<double> f_far_ic, f_near_ic;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out", out_path, "output path (default: stdout)");
        return cmd;
    };
    auto add_model_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--varrho", f_varrho, "delay (overrides config)");
        cmd->add_option("--u", f_u, "control gain (overrides config)");
        cmd->add_option("--seed", f_seed, "RNG seed (overrides config)");
        cmd->add_option("--h", f_h, "integration step (overrides config)");
        cmd->add_option("--horizon", f_horizon, "integration horizon (overrides config)");
        cmd->add_option("--tail-fraction", f_tail, "classification tail fraction");
        cmd->add_option("--steady-tol", f_steady_tol, "steady amplitude threshold");
        return cmd;
    };

    CLI::App* c_sim = add_model_overrides(add_common(
        app.add_subcommand("simulate", "integrate the system; Outcome JSON plus optional CSV")));
    c_sim->add_option("--csv", csv_path, "write the trajectory CSV here");

    add_common(app.add_subcommand("equilibrium", "interior equilibrium as JSON"));

    CLI::App* c_stab = add_model_overrides(add_common(app.add_subcommand(
        "stability", "linearization, no-delay verdict and delay-dependent condition report")));
    (void)c_stab;

    CLI::App* c_cross = add_model_overrides(add_common(
        app.add_subcommand("crossings", "imaginary-axis crossings and critical delays")));
    c_cross->add_option("--n-max", f_nmax, "ladder length (crossings n = 0..n_max)");
    c_cross->add_flag("--paper-mode", paper_mode,
                      "also report the alternative published coefficient source");

    add_model_overrides(add_common(app.add_subcommand(
        "delay-bound", "delay-length bound report for both coefficient sources")));

    CLI::App* c_hopf =
        add_common(app.add_subcommand("hopf", "no-delay Hopf points over a parameter window"));
    c_hopf->add_option("--param", f_param, "parameter to vary (m|p|c|d|e|a)");
    c_hopf->add_option("--lo", f_lo, "window lower end");
    c_hopf->add_option("--hi", f_hi, "window upper end");
    c_hopf->add_option("--seeds", f_seeds, "scan seed count");

    CLI::App* c_lpc = add_model_overrides(
        add_common(app.add_subcommand("lpc", "limit point of cycles by bistability bisection")));
    c_lpc->add_option("--param", f_param, "parameter to vary (m|p|c|d|e|a)");
    c_lpc->add_option("--lo", f_lo, "bracket lower end");
    c_lpc->add_option("--hi", f_hi, "bracket upper end");
    c_lpc->add_option("--tol", f_tol, "bracket width tolerance");
    c_lpc->add_option("--far-ic", f_far_ic, "off-equilibrium initial point, x y")->expected(2);

    CLI::App* c_sweep = add_model_overrides(
        add_common(app.add_subcommand("sweep", "per-sample equilibrium/eigenvalue/outcome data")));
    c_sweep->add_option("--param", f_param, "parameter to vary (m|p|c|d|e|a)");
    c_sweep->add_option("--lo", f_lo, "window lower end");
    c_sweep->add_option("--hi", f_hi, "window upper end");
    c_sweep->add_option("--n", f_n, "sample count");
    c_sweep->add_option("--near-ic", f_near_ic, "near initial point, x y")->expected(2);
    c_sweep->add_option("--far-ic", f_far_ic, "far initial point, x y")->expected(2);
    c_sweep->add_option("--csv", csv_path, "write the sweep CSV here");
    c_sweep->add_option("--jobs", jobs, "parallel sample workers")->envname("HERDBIF_JOBS");

    CLI::App* c_ctl = add_model_overrides(
        add_common(app.add_subcommand("control", "minimum stabilizing feedback gain")));
    c_ctl->add_option("--u-lo", f_ulo, "bracket lower gain");
    c_ctl->add_option("--u-hi", f_uhi, "bracket upper gain");
    c_ctl->add_option("--tol", f_tol, "bracket width tolerance");
    c_ctl->add_option("--csv", csv_path, "write the gain scan CSV here (u, omega0, im_h, stable)");

    CLI::App* c_prcc =
        add_model_overrides(add_common(app.add_subcommand("prcc", "LHS/PRCC sensitivity CSV")));
    c_prcc->add_option("--n", f_n, "LHS sample count");
    c_prcc->add_option("--fraction", f_fraction, "range half-width around the nominal values");
    c_prcc->add_option("--output", f_output, "model output to rank (x|y)");
    c_prcc->add_option("--json", json_path, "also write the result as JSON here");
    c_prcc->add_option("--jobs", jobs, "parallel row workers")->envname("HERDBIF_JOBS");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = load_config(config_path);
        auto over = [&](CLI::App* cmd, const char* name) { return cmd->count(name) > 0; };
        CLI::App* cmd = app.get_subcommands().front();
        const std::string sub = cmd->get_name();

        if (over(cmd, "--varrho")) cfg.varrho = f_varrho;
        if (over(cmd, "--u")) cfg.u = f_u;
        if (over(cmd, "--seed")) cfg.seed = f_seed;
        if (over(cmd, "--h")) cfg.sim.h = f_h;
        if (over(cmd, "--horizon")) cfg.sim.horizon = f_horizon;
        if (over(cmd, "--tail-fraction")) cfg.sim.tail_fraction = f_tail;
        if (over(cmd, "--steady-tol")) cfg.sim.steady_tol = f_steady_tol;

        if (sub == "simulate") {
            const auto& mp = need_params(cfg);
            std::optional<herdbif::Equilibrium> target;
            if (cfg.u != 0.0) target = need_equilibrium(mp);
            const herdbif::Trajectory traj =
                herdbif::simulate(mp, cfg.history, cfg.varrho, cfg.u, target, cfg.sim);
            const herdbif::Outcome oc = herdbif::classify(traj, cfg.sim);
            if (!csv_path.empty()) {
                std::ostringstream os;
                herdbif::write_trajectory_csv(os, traj);
                emit_text(csv_path, os.str());
            }
            emit_json(out_path, json(oc));
        } else if (sub == "equilibrium") {
            const auto eq = herdbif::equilibrium(need_params(cfg));
            emit_json(out_path, eq ? json(*eq) : json{{"feasible", false}});
        } else if (sub == "stability") {
            const auto& mp = need_params(cfg);
            const auto eq = need_equilibrium(mp);
            const auto lin = herdbif::linearize(mp, eq);
            json j{{"linearization", lin},
                   {"u", cfg.u},
                   {"nodelay_stable", herdbif::stability_nodelay(lin, cfg.u)},
                   {"lyapunov", herdbif::lyapunov_conditions(lin, cfg.varrho)},
                   {"boundedness", herdbif::boundedness_check(mp)}};
            emit_json(out_path, j);
        } else if (sub == "crossings") {
            const auto& mp = need_params(cfg);
            const auto lin = herdbif::linearize(mp, need_equilibrium(mp));
            const int n_max = over(cmd, "--n-max") ? f_nmax : cfg.n_max;
            json j{{"u", cfg.u},
                   {"coeffs", herdbif::controlled_coeffs(lin, cfg.u)},
                   {"crossings", herdbif::imaginary_crossings(lin, cfg.u, n_max)}};
            if (paper_mode) {
                const auto k5 = herdbif::paper_section5_coeffs(lin);
                j["paper_section5"] = json{{"coeffs", k5},
                                           {"crossings", herdbif::crossings_for_coeffs(k5, n_max)}};
            }
            emit_json(out_path, j);
        } else if (sub == "delay-bound") {
            const auto& mp = need_params(cfg);
            const auto lin = herdbif::linearize(mp, need_equilibrium(mp));
            json j{{"derived", herdbif::delay_bound(herdbif::derived_coeffs(lin))},
                   {"paper_section5", herdbif::delay_bound(herdbif::paper_section5_coeffs(lin))}};
            emit_json(out_path, j);
        } else if (sub == "hopf") {
            const auto& mp = need_params(cfg);
            if (over(cmd, "--param")) cfg.hopf.param = f_param;
            if (over(cmd, "--lo")) cfg.hopf.lo = f_lo;
            if (over(cmd, "--hi")) cfg.hopf.hi = f_hi;
            if (over(cmd, "--seeds")) cfg.hopf.seeds = f_seeds;
            const auto id = need_param_id(cfg.hopf.param, "hopf");
            const auto points =
                herdbif::hopf_nodelay(mp, id, cfg.hopf.lo, cfg.hopf.hi, cfg.hopf.seeds);
            emit_json(out_path, json(points));
        } else if (sub == "lpc") {
            const auto& mp = need_params(cfg);
            if (over(cmd, "--param")) cfg.lpc.param = f_param;
            if (over(cmd, "--lo")) cfg.lpc.lo = f_lo;
            if (over(cmd, "--hi")) cfg.lpc.hi = f_hi;
            if (over(cmd, "--tol")) cfg.lpc.tol = f_tol;
            if (over(cmd, "--far-ic")) cfg.lpc.far_ic = parse_ic(f_far_ic, "--far-ic");
            const auto id = need_param_id(cfg.lpc.param, "lpc");
            if (!cfg.lpc.far_ic) throw std::invalid_argument("lpc: far_ic missing (config or --far-ic)");
            const auto pt =
                herdbif::lpc_locate(mp, id, cfg.lpc.lo, cfg.lpc.hi,
                                    herdbif::History::constant(*cfg.lpc.far_ic), cfg.lpc.tol, cfg.sim);
            emit_json(out_path, json(pt));
        } else if (sub == "sweep") {
            const auto& mp = need_params(cfg);
            if (over(cmd, "--param")) cfg.sweep.param = f_param;
            if (over(cmd, "--lo")) cfg.sweep.lo = f_lo;
            if (over(cmd, "--hi")) cfg.sweep.hi = f_hi;
            if (over(cmd, "--n")) cfg.sweep.n = f_n;
            if (over(cmd, "--near-ic")) cfg.sweep.near_ic = parse_ic(f_near_ic, "--near-ic");
            if (over(cmd, "--far-ic")) cfg.sweep.far_ic = parse_ic(f_far_ic, "--far-ic");
            const auto id = need_param_id(cfg.sweep.param, "sweep");
            if (cfg.sweep.n < 2) throw std::invalid_argument("sweep: need n >= 2 (config or --n)");
            const herdbif::State far = cfg.sweep.far_ic.value_or(herdbif::State{0.4, 0.3});
            const auto sw = herdbif::sweep(mp, id, cfg.sweep.lo, cfg.sweep.hi, cfg.sweep.n,
                                           cfg.sweep.near_ic, far, cfg.sim, jobs);
            if (!csv_path.empty()) {
                std::ostringstream os;
                herdbif::write_sweep_csv(os, sw);
                emit_text(csv_path, os.str());
            }
            emit_json(out_path, json(sw));
        } else if (sub == "control") {
            const auto& mp = need_params(cfg);
            const auto lin = herdbif::linearize(mp, need_equilibrium(mp));
            if (over(cmd, "--u-lo")) cfg.control.u_lo = f_ulo;
            if (over(cmd, "--u-hi")) cfg.control.u_hi = f_uhi;
            if (over(cmd, "--tol")) cfg.control.tol = f_tol;
            if (!csv_path.empty()) {
                std::ostringstream os;
                os << "u,omega0,im_h,stable\n";
                for (int i = 0; i < cfg.control.scan_points; ++i) {
                    const double u =
                        cfg.control.scan_lo + (cfg.control.scan_hi - cfg.control.scan_lo) * i /
                                                  std::max(1, cfg.control.scan_points - 1);
                    os << herdbif::format_sig17(u) << ',';
                    if (cfg.varrho > 0.0) {
                        const auto probe = herdbif::control_re_root(lin, u, cfg.varrho);
                        if (probe) {
                            os << herdbif::format_sig17(probe->omega0) << ','
                               << herdbif::format_sig17(probe->im_h) << ','
                               << (probe->im_h > 0.0 ? 1 : 0) << '\n';
                        } else {
                            os << ",," << 1 << '\n';
                        }
                    } else {
                        os << ",," << (herdbif::stability_nodelay(lin, u) ? 1 : 0) << '\n';
                    }
                }
                emit_text(csv_path, os.str());
            }
            const double u_min = herdbif::min_stabilizing_u(lin, cfg.varrho, cfg.control.u_lo,
                                                            cfg.control.u_hi, cfg.control.tol);
            json j{{"varrho", cfg.varrho},
                   {"u_threshold", u_min},
                   {"bracket", json{{"u_lo", cfg.control.u_lo}, {"u_hi", cfg.control.u_hi}}}};
            if (lin.a11 > lin.x_star) {
                j["nodelay_closed_form"] = 0.5 * (lin.a11 - lin.x_star);
            } else {
                j["nodelay_closed_form"] = nullptr;
            }
            emit_json(out_path, j);
        } else if (sub == "prcc") {
            const auto& mp = need_params(cfg);
            if (over(cmd, "--n")) cfg.prcc.n = f_n;
            if (over(cmd, "--fraction")) cfg.prcc.fraction = f_fraction;
            if (over(cmd, "--output")) cfg.prcc.output = f_output;
            std::vector<double> tps = cfg.prcc.time_points;
            if (tps.empty()) {
                for (double t = 10.0; t <= 100.0; t += 10.0) tps.push_back(t);
            }
            const auto pr = herdbif::prcc_timeseries(
                mp, cfg.prcc.fraction, cfg.prcc.n, tps,
                herdbif::output_var_from_string(cfg.prcc.output), cfg.varrho, cfg.seed, cfg.sim,
                jobs);
            std::ostringstream os;
            herdbif::write_prcc_csv(os, pr);
            emit_text(out_path, os.str());
            if (!json_path.empty()) emit_json(json_path, json(pr));
        }
        return 0;
    } catch (const herdbif::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
