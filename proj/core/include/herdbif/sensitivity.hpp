#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "herdbif/dde.hpp"
#include "herdbif/model.hpp"

namespace herdbif {

/// Latin hypercube design: per column, exactly one sample falls in each of
/// the N equal-width strata of its range (stratified without replacement).
struct LhsDesign {
    std::vector<std::string> param_names;
    std::vector<std::pair<double, double>> ranges;
    std::vector<std::vector<double>> matrix;  ///< N rows of P values
    std::uint64_t seed = 0;
};

/// Stratified sampling without replacement, one independent permutation per
/// parameter. Deterministic for a given seed.
LhsDesign lhs_sample(const std::vector<std::string>& param_names,
                     const std::vector<std::pair<double, double>>& ranges,
                     int n, std::uint64_t seed);

/// Partial rank correlation coefficients of each design column against the
/// outputs: rank-transform everything (average ranks on ties), regress both
/// the column and the output on all other rank columns plus an intercept,
/// and correlate the residuals. Throws DegenerateDesign when any rank column
/// (or the output) is constant.
std::vector<double> prcc(const LhsDesign& design, const std::vector<double>& outputs);

enum class OutputVar { X, Y };

const char* to_string(OutputVar v);
OutputVar output_var_from_string(const std::string& name);

/// PRCC of every model parameter at a sequence of output times.
struct PrccResult {
    std::vector<double> time_points;
    std::vector<std::string> param_names;
    std::vector<std::vector<double>> coefficients;  ///< [time][param]
    OutputVar output = OutputVar::X;
    int rows_used = 0;
    int rows_dropped = 0;
};

/// Builds the +-fraction LHS design around the nominal parameters
/// (m, p, c, d, e, a), simulates each row once to the last time point from
/// the constant history (0.4, 0.3), evaluates the chosen output at every
/// time point and runs prcc per time point. Rows whose simulation fails are
/// dropped with a warning on stderr; more than 10% failures is an Error.
PrccResult prcc_timeseries(const ModelParams& nominal, double fraction, int n,
                           const std::vector<double>& time_points, OutputVar output,
                           double varrho, std::uint64_t seed, const SimOptions& opt,
                           unsigned jobs);

}  // namespace herdbif
