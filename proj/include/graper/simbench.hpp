#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "graper/fit.hpp"
#include "graper/linear.hpp"
#include "graper/model.hpp"

namespace graper {

struct SimulationConfig {
    Index n = 100;
    Index p = 300;
    int G = 6;
    double rho = 0.0;
    double tau = 1.0;
    double nu = 0.2;
    // Empty: tiers 0.01, 1, 100 assigned to consecutive pairs of groups.
    std::vector<double> gamma_levels;
    std::uint64_t seed = 0;
    Index n_test = 1000;

    void validate() const;
    std::vector<double> resolved_gamma() const;
    // Within each pair of groups the first gets nu, the second min(1, 1.5 nu).
    std::vector<double> resolved_pi() const;
};

struct GroundTruth {
    Vector beta_true;
    Vector s_true;
    Vector gamma_true;
    Vector pi_true;
};

struct SimulatedData {
    Dataset train;
    Dataset test;
    GroundTruth truth;
    GroupPartition groups;  // G contiguous blocks of p / G features
};

// Cholesky factor of the Toeplitz matrix Sigma_ij = rho^|i-j|.
Matrix toeplitz_cholesky(Index p, double rho);

// Coefficients, training and test designs and noise come from separate
// streams of Rng(cfg.seed), so n_test does not perturb the training data.
SimulatedData simulate_dataset(const SimulationConfig& cfg);

// p features, half scaled by 10 with unit coefficients and half left at
// unit scale with zero coefficients; unit noise.
SimulatedData simulate_amplitude_example(std::uint64_t seed, Index n_train = 500, Index n_test = 500,
                                         Index p = 600);

struct Metrics {
    double rmse_y = 0.0;
    double rmse_beta = 0.0;
    double gamma_rank_corr = 0.0;  // NaN when the fit has a different group count
    double pi_abs_err = 0.0;       // NaN when the fit has a different group count
    double f1 = 0.0;
};

double rmse(const Vector& a, const Vector& b);

// Spearman correlation with average ranks for ties.
double spearman(const Vector& a, const Vector& b);

// Rank correlation of an estimate against a tiered truth: the estimate's
// ranks are averaged within each block of tied true values, so any ordering
// consistent with the tiers scores 1 and the reversed ordering -1.
double tier_rank_correlation(const Vector& estimate, const Vector& truth);

// Selection F1 of `selected` against `active`; 1 when both are empty.
double selection_f1(const std::vector<bool>& selected, const std::vector<bool>& active);

Metrics evaluate(const FitSummary& fit, const GroundTruth& truth, const Dataset& test);

// Method variants compared by the grid and the runtime benchmark.
struct Variant {
    std::string name;
    ModelSpec spec;
    bool dense = false;
    bool single_group = false;
};

std::vector<Variant> default_variants();
Variant find_variant(const std::string& name);

enum class SweepParameter { p, n, rho, tau, nu };

SweepParameter parse_sweep_parameter(const std::string& name);
std::string to_string(SweepParameter parameter);
std::vector<double> default_sweep_values(SweepParameter parameter);
void apply_sweep_value(SimulationConfig& cfg, SweepParameter parameter, double value);

struct GridOptions {
    SweepParameter parameter = SweepParameter::p;
    std::vector<double> values;  // empty: default_sweep_values(parameter)
    int replicates = 10;
    std::vector<Variant> variants;  // empty: default_variants()
    FitConfig config;
    HyperPriors hyper;
    int threads = 1;
};

struct GridRow {
    std::string parameter;
    double value = 0.0;
    int replicate = 0;
    std::uint64_t seed = 0;
    std::string variant;
    Metrics metrics;
    Vector gamma_hat;
    Vector pi_hat;
    double seconds = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string error;  // empty unless the fit failed
};

// One row per value x replicate x variant; replicate r uses seed base.seed + r.
// Fit failures are recorded in the row instead of aborting the grid.
std::vector<GridRow> run_grid(const SimulationConfig& base, const GridOptions& options);
void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows);

struct CvOptions {
    int k_folds = 10;
    ModelSpec spec;
    int threads = 1;
};

struct FoldResult {
    int fold = 0;
    Index n_train = 0;
    Index n_test = 0;
    double rmse = 0.0;                  // linear; NaN for logistic
    double classification_error = 0.0;  // logistic; NaN for linear
    double log_loss = 0.0;              // logistic; NaN for linear
    Vector gamma_hat;
    Vector pi_hat;
    int iterations = 0;
    bool converged = false;
};

// Rows shuffled by Rng(seed) and dealt round-robin into k folds; each fold's
// indices are sorted.
std::vector<std::vector<Index>> make_folds(Index n, int k_folds, std::uint64_t seed);

// Each fold is fitted on its training rows only (so centering and scaling are
// estimated there) and scored on its held-out rows.
std::vector<FoldResult> cross_validate(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                                       const FitConfig& config, const CvOptions& options);
void write_cv_csv(std::ostream& out, const std::vector<FoldResult>& folds);

struct BenchmarkOptions {
    std::vector<Index> n_values{50, 100, 200, 400};
    std::vector<Index> p_values{120, 240, 480, 960};
    std::vector<int> G_values{2, 4, 6, 10, 20};
    int replicates = 10;
    int sweeps = 0;  // > 0: fixed sweep count per fit; 0: run to convergence
    std::vector<Variant> variants;  // empty: sparse, dense, multivariate
    FitConfig config;
    HyperPriors hyper;
};

struct TimingRow {
    std::string axis;
    double value = 0.0;
    std::string variant;
    double mean_seconds = 0.0;
    double sd_seconds = 0.0;
    double mean_iterations = 0.0;
    int replicates = 0;
    int failures = 0;
};

// Varies one of n, p, G at a time with the others held at base values.
std::vector<TimingRow> benchmark_runtime(const SimulationConfig& base, const BenchmarkOptions& options);
void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows);

}  // namespace graper
