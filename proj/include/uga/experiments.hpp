#pragma once

#include "uga/generators.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace uga {

/// Seeded trial results of one experiment. Rows hold numeric cells for
/// `columns` plus the trial seed, written as a trailing "seed" column.
struct ExperimentReport {
    struct Row {
        std::vector<double> values;
        std::uint64_t seed = 0;
    };

    std::string name;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<std::string> columns;
    std::vector<Row> rows;

    /// Aggregation rule: means of mean_columns, per distinct value of
    /// group_by (in first-appearance order) or over all rows when empty.
    std::string group_by;
    std::vector<std::string> mean_columns;
    std::vector<std::pair<std::string, double>> aggregate;

    std::size_t column(const std::string& name) const;
    double value(std::size_t row, const std::string& name) const { return rows[row].values[column(name)]; }
    const std::string* parameter(const std::string& key) const;
};

/// Keys look like "mean_passed[epsilon=0.5]" or "mean_accuracy_original".
/// NaN cells are skipped; a mean over no finite cells is NaN.
std::vector<std::pair<std::string, double>> compute_aggregate(const ExperimentReport& report);

/// "# key=value" metadata lines, header, rows, then "# aggregate key=value"
/// lines. Numbers use 17 significant digits, so parsing restores them exactly.
void write_report(std::ostream& out, const ExperimentReport& report);
/// Throws ParseError.
ExperimentReport parse_report(std::istream& in);

/// "a:step:b" ranges (inclusive of b within 1e-9) and comma lists, mixable:
/// "0.2:0.05:0.95,0.99".
std::vector<double> parse_epsilon_grid(const std::string& text);
inline constexpr const char* default_epsilon_grid = "0.2:0.05:0.95,0.99";

struct SuccessRateConfig {
    std::size_t n = 200;
    double p = 0.3;
    WeightDist dist;
    std::size_t trials = 20;
    std::vector<double> epsilons;
    std::uint64_t seed = 1;
};

/// One weighted G(n, p) per trial, sparsified at every epsilon and certified
/// against (1 +- eps)^2.
ExperimentReport run_success_rate(const SuccessRateConfig& cfg);

struct SbmSuccessConfig {
    SbmSpec spec{300, 2, 0.1, 0.01, {}};
    std::size_t trials = 20;
    std::vector<double> epsilons;
    std::uint64_t seed = 1;
};

ExperimentReport run_sbm_success(const SbmSuccessConfig& cfg);

struct IsotropicSuccessConfig {
    std::size_t n = 50;
    std::size_t m = 0;  ///< 0 means n^2
    std::size_t trials = 20;
    std::vector<double> epsilons;
    std::uint64_t seed = 1;
};

ExperimentReport run_isotropic_success(const IsotropicSuccessConfig& cfg);

struct ClusteringConfig {
    SbmSpec spec{400, 4, 0.08, 0.008, {}};
    double epsilon = 0.75;
    std::size_t trials = 20;
    std::uint64_t seed = 1;
};

/// Spectral clustering of each SBM graph and of its sparsifier with negative
/// weights clamped to zero (counted in clamped_edges).
ExperimentReport run_clustering(const ClusteringConfig& cfg);

struct LsqConfig {
    std::size_t n = 60;
    std::size_t m = 3600;
    std::vector<double> epsilons;
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    double noise = 0.1;
    std::size_t repetitions = 10;  ///< timings are medians over this many solves
};

/// Per (epsilon, trial): relative errors of the sketched least-squares
/// solution and of the normal-equation solve against the full QR solution,
/// their perturbation bounds (NaN when inapplicable), and timings.
ExperimentReport run_lsq(const LsqConfig& cfg);

}  // namespace uga
