#include "herdbif/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "herdbif/errors.hpp"
#include "herdbif/parallel.hpp"

namespace herdbif {

namespace {

// Explicit draws so designs stay bit-identical across standard libraries.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t k) {
    return rng() % k;  // modulo bias is ~2^-53 here, irrelevant for sampling
}

std::vector<double> ranks_avg(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank, 1-based
        for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
        i = j + 1;
    }
    return r;
}

bool is_constant(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// Residual of y against span{1, z...} via modified Gram-Schmidt.
class Projector {
public:
    explicit Projector(const std::vector<const std::vector<double>*>& z_cols, std::size_t n) {
        std::vector<double> ones(n, 1.0);
        add(ones);
        for (const auto* col : z_cols) add(*col);
    }

    std::vector<double> residual(std::vector<double> y) const {
        for (const auto& q : basis_) {
            const double coef = dot(q, y);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] -= coef * q[i];
        }
        return y;
    }

private:
    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }

    void add(std::vector<double> v) {
        for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalize once
            for (const auto& q : basis_) {
                const double coef = dot(q, v);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= coef * q[i];
            }
        }
        const double nrm = std::sqrt(dot(v, v));
        if (nrm < 1e-12 * std::sqrt(static_cast<double>(v.size()))) return;  // dependent column
        for (double& x : v) x /= nrm;
        basis_.push_back(std::move(v));
    }

    std::vector<std::vector<double>> basis_;
};

std::vector<double> prcc_from_columns(const std::vector<std::vector<double>>& cols,
                                      const std::vector<double>& outputs) {
    const std::size_t p = cols.size();
    const std::size_t n = outputs.size();
    for (const auto& col : cols) {
        if (is_constant(col)) throw DegenerateDesign("constant parameter rank column");
    }
    if (is_constant(outputs)) throw DegenerateDesign("constant output column");

    std::vector<std::vector<double>> rank_cols(p);
    for (std::size_t j = 0; j < p; ++j) rank_cols[j] = ranks_avg(cols[j]);
    const std::vector<double> rank_out = ranks_avg(outputs);

    std::vector<double> coeffs(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<const std::vector<double>*> others;
        others.reserve(p - 1);
        for (std::size_t k = 0; k < p; ++k) {
            if (k != j) others.push_back(&rank_cols[k]);
        }
        const Projector proj(others, n);
        const std::vector<double> rj = proj.residual(rank_cols[j]);
        const std::vector<double> ry = proj.residual(rank_out);
        double sjj = 0.0;
        double syy = 0.0;
        double sjy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sjj += rj[i] * rj[i];
            syy += ry[i] * ry[i];
            sjy += rj[i] * ry[i];
        }
        if (!(sjj > 0.0) || !(syy > 0.0)) {
            throw DegenerateDesign("zero residual variance for column " + std::to_string(j));
        }
        coeffs[j] = std::clamp(sjy / std::sqrt(sjj * syy), -1.0, 1.0);
    }
    return coeffs;
}

}  // namespace

LhsDesign lhs_sample(const std::vector<std::string>& param_names,
                     const std::vector<std::pair<double, double>>& ranges,
                     int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("need n >= 2 samples");
    if (param_names.empty() || param_names.size() != ranges.size()) {
        throw std::invalid_argument("param_names and ranges must match and be non-empty");
    }
    for (const auto& [lo, hi] : ranges) {
        if (!(lo < hi)) throw std::invalid_argument("degenerate range");
    }

    LhsDesign design;
    design.param_names = param_names;
    design.ranges = ranges;
    design.seed = seed;
    design.matrix.assign(static_cast<std::size_t>(n),
                         std::vector<double>(param_names.size(), 0.0));

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < param_names.size(); ++j) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = perm.size() - 1; i > 0; --i) {
            std::swap(perm[i], perm[bounded(rng, i + 1)]);
        }
        const auto [lo, hi] = ranges[j];
        const double width = (hi - lo) / n;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            design.matrix[i][j] = lo + (static_cast<double>(perm[i]) + uniform01(rng)) * width;
        }
    }
    return design;
}

std::vector<double> prcc(const LhsDesign& design, const std::vector<double>& outputs) {
    const std::size_t n = design.matrix.size();
    const std::size_t p = design.param_names.size();
    if (outputs.size() != n) throw std::invalid_argument("outputs length must match the design");
    if (n <= p + 2) throw std::invalid_argument("need N > P + 2 samples");

    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) cols[j][i] = design.matrix[i][j];
    }
    return prcc_from_columns(cols, outputs);
}

const char* to_string(OutputVar v) { return v == OutputVar::X ? "x" : "y"; }

OutputVar output_var_from_string(const std::string& name) {
    if (name == "x") return OutputVar::X;
    if (name == "y") return OutputVar::Y;
    throw std::invalid_argument("output must be \"x\" or \"y\"");
}

PrccResult prcc_timeseries(const ModelParams& nominal, double fraction, int n,
                           const std::vector<double>& time_points, OutputVar output,
                           double varrho, std::uint64_t seed, const SimOptions& opt,
                           unsigned jobs) {
    nominal.validate();
    if (!(fraction > 0.0) || !(fraction < 1.0)) {
        throw std::invalid_argument("fraction must lie in (0, 1)");
    }
    if (time_points.empty()) throw std::invalid_argument("need at least one time point");
    for (std::size_t i = 1; i < time_points.size(); ++i) {
        if (!(time_points[i] > time_points[i - 1])) {
            throw std::invalid_argument("time points must be strictly increasing");
        }
    }
    if (!(time_points.front() > 0.0)) throw std::invalid_argument("time points must be positive");

    const std::vector<std::string> names{"m", "p", "c", "d", "e", "a"};
    const std::vector<double> nominals{nominal.m, nominal.p, nominal.c,
                                       nominal.d, nominal.e, nominal.a};
    std::vector<std::pair<double, double>> ranges;
    ranges.reserve(names.size());
    for (double v : nominals) ranges.emplace_back(v * (1.0 - fraction), v * (1.0 + fraction));

    const LhsDesign design = lhs_sample(names, ranges, n, seed);
    SimOptions run_opt = opt;
    run_opt.horizon = time_points.back();

    const History history = History::constant({0.4, 0.3});
    const std::size_t rows = design.matrix.size();
    const std::size_t t_count = time_points.size();
    std::vector<std::vector<double>> row_outputs(rows, std::vector<double>(t_count, 0.0));
    std::vector<char> ok(rows, 0);

    parallel_for(rows, jobs, [&](std::size_t i) {
        ModelParams mp;
        mp.m = design.matrix[i][0];
        mp.p = design.matrix[i][1];
        mp.c = design.matrix[i][2];
        mp.d = design.matrix[i][3];
        mp.e = design.matrix[i][4];
        mp.a = design.matrix[i][5];
        try {
            const Trajectory traj = simulate(mp, history, varrho, 0.0, std::nullopt, run_opt);
            for (std::size_t t = 0; t < t_count; ++t) {
                const State s = traj.eval(time_points[t]);
                row_outputs[i][t] = output == OutputVar::X ? s.x : s.y;
            }
            ok[i] = 1;
        } catch (const std::exception&) {
            ok[i] = 0;
        }
    });

    std::size_t kept = 0;
    for (char f : ok) kept += f;
    const std::size_t dropped = rows - kept;
    if (dropped > 0) {
        std::cerr << "prcc_timeseries: dropped " << dropped << " of " << rows
                  << " rows whose simulation failed\n";
    }
    if (10 * dropped > rows) {
        throw Error("prcc_timeseries: more than 10% of the sampled rows failed to simulate");
    }

    std::vector<std::vector<double>> cols(names.size(), std::vector<double>(kept));
    std::vector<std::size_t> kept_rows;
    kept_rows.reserve(kept);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!ok[i]) continue;
        const std::size_t r = kept_rows.size();
        for (std::size_t j = 0; j < names.size(); ++j) cols[j][r] = design.matrix[i][j];
        kept_rows.push_back(i);
    }

    PrccResult result;
    result.time_points = time_points;
    result.param_names = names;
    result.output = output;
    result.rows_used = static_cast<int>(kept);
    result.rows_dropped = static_cast<int>(dropped);
    result.coefficients.resize(t_count);
    std::vector<double> outputs(kept);
    for (std::size_t t = 0; t < t_count; ++t) {
        for (std::size_t r = 0; r < kept_rows.size(); ++r) {
            outputs[r] = row_outputs[kept_rows[r]][t];
        }
        result.coefficients[t] = prcc_from_columns(cols, outputs);
    }
    return result;
}

}  // namespace herdbif
