#pragma once

#include <cstdint>

#include "graper/model.hpp"

namespace graper {

struct FitConfig {
    int max_iter = 3000;
    // Sweeps run before the convergence test may stop the loop; set equal to
    // max_iter for a fixed sweep count.
    int min_iter = 1;
    double elbo_rel_tol = 1e-5;
    std::uint64_t seed = 0;
    bool dense_only = false;  // pi = 1, s = 1
    bool standardize = true;
    bool intercept = true;

    void validate() const;
};

struct LinearFit {
    FitSummary summary;
    VariationalState state;
};

// Algorithm steps, exposed for testing and for composing custom loops. All
// operate on preprocessed data.
void update_pi(VariationalState& state, const GroupPartition& groups, const HyperPriors& hyper);
void update_spike_slab_coefficient(Index j, VariationalState& state, const Dataset& data,
                                   const GroupPartition& groups, const ExpectationBundle& e);
void update_tau(VariationalState& state, const Dataset& data, const HyperPriors& hyper);
void update_gamma(VariationalState& state, const GroupPartition& groups, const ExpectationBundle& e,
                  const HyperPriors& hyper);

// E||y - X beta||^2 = ||y - v||^2 + sum_j ||X_j||^2 Var(beta_j), O(np).
double expected_squared_residual(const VariationalState& state, const Dataset& data);

double compute_elbo_linear(const VariationalState& state, const Dataset& data, const GroupPartition& groups,
                           const HyperPriors& hyper);

// One pass: pi, every (b_j, s_j) in index order, tau, gamma, then the ELBO,
// which is appended to the trace and returned.
double linear_sweep(VariationalState& state, const Dataset& data, const GroupPartition& groups,
                    const HyperPriors& hyper);

// Standardizes/centers per `config`, then sweeps until the relative ELBO
// change drops below config.elbo_rel_tol or max_iter is reached.
LinearFit fit_linear(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                     const FitConfig& config);

Vector predict_linear(const FitSummary& summary, const Matrix& X_new);

}  // namespace graper
