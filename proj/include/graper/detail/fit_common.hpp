#pragma once

#include <cstdint>

#include "graper/model.hpp"

namespace graper::detail {

// Initial state: psi = 1, mu ~ N(0, 1) from the seeded stream, sigma2 = 1,
// E[tau] = E[gamma_k] = 1 (alpha = beta = 1), Beta(1, 1) for pi.
VariationalState initial_state(const Matrix& X, const GroupPartition& groups, std::uint64_t seed, bool dense,
                               bool has_tau);

// Every bound term that does not involve the likelihood: E log p(b | gamma),
// E log p(s | pi), E log p(gamma), E log p(pi) and the entropies of q(b, s),
// q(gamma), q(pi).
double coefficient_prior_terms(const VariationalState& state, const ExpectationBundle& e,
                               const GroupPartition& groups, const HyperPriors& hyper);

// Per-feature Var(beta_j) under q.
Vector coefficient_variances(const VariationalState& state);

FitSummary summarize(const VariationalState& state, const GroupPartition& groups,
                     const PreprocessTransform& transform, ModelKind model, bool converged,
                     const std::vector<std::string>& feature_names);

// Maps an intercept on the transformed scale back to raw features and response.
void set_original_intercept(FitSummary& summary, double fitted_intercept);

// Relative change used by every fitting loop.
bool elbo_converged(const std::vector<double>& trace, double tolerance);

}  // namespace graper::detail
