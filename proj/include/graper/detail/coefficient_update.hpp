#pragma once

#include <cmath>

#include "graper/errors.hpp"
#include "graper/model.hpp"
#include "graper/special.hpp"

namespace graper::detail {

// Mean-field update of q(b_j, s_j) under a Gaussian likelihood term
// -1/2 sum_i w_i (response_i - intercept - x_i^T beta)^2 with per-sample
// precisions w. The linear model uses w_i = E[tau]; the logistic bound uses
// w_i = 2 eta(xi_i) on pseudo-data. Keeps v = X E[beta] in sync.
template <class Weights>
void update_coefficient(Index j, VariationalState& state, const Matrix& X, const Vector& response,
                        const Weights& weights, double slab_precision, double prior_logit) {
    const auto x = X.col(j);
    const double old_beta = state.psi[j] * state.mu[j];
    const double likelihood_precision = (weights.array() * x.array().square()).sum();
    const double precision = likelihood_precision + slab_precision;
    if (!(precision > 0.0)) {
        throw NumericalError("coefficient " + std::to_string(j + 1) + " has zero posterior precision");
    }
    const double projection =
        (weights.array() * x.array() * (response.array() - state.v.array() - state.intercept_mean)).sum() +
        likelihood_precision * old_beta;

    const double sigma2 = 1.0 / precision;
    const double mu = sigma2 * projection;
    double psi = 1.0;
    if (!state.dense) {
        const double logit =
            prior_logit + 0.5 * std::log(slab_precision) + 0.5 * std::log(sigma2) + 0.5 * mu * mu / sigma2;
        psi = sigmoid(logit);
    }
    state.mu[j] = mu;
    state.sigma2[j] = sigma2;
    state.psi[j] = psi;

    const double delta = psi * mu - old_beta;
    if (delta != 0.0) {
        state.v.noalias() += delta * x;
    }
}

// Unpenalized intercept (flat prior): a coefficient on a column of ones with
// zero prior precision and no spike.
template <class Weights>
void update_intercept(VariationalState& state, const Vector& response, const Weights& weights) {
    const double precision = weights.sum();
    if (!(precision > 0.0)) {
        throw NumericalError("intercept has zero posterior precision");
    }
    state.intercept_var = 1.0 / precision;
    state.intercept_mean = (weights.array() * (response.array() - state.v.array())).sum() / precision;
}

}  // namespace graper::detail
