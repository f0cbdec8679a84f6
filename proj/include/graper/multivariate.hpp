#pragma once

#include "graper/linear.hpp"
#include "graper/model.hpp"

namespace graper {

enum class InversionRoute { automatic, direct, woodbury };

// Dense model with a full-covariance q(beta) = N(mu, Sigma). For the
// logistic model with an intercept, mu and Sigma carry one extra trailing
// coordinate for it.
struct MultivariateState {
    Vector mu;
    Matrix Sigma;
    double log_det_sigma = 0.0;
    Vector alpha_gamma;
    Vector beta_gamma;
    double alpha_tau = 1.0;
    double beta_tau = 1.0;
    Vector xi;
    bool has_tau = true;
    bool has_intercept_term = false;
    InversionRoute last_route = InversionRoute::automatic;
    std::vector<double> elbo_trace;

    Index num_features() const { return mu.size() - (has_intercept_term ? 1 : 0); }
    void validate() const;
};

struct GaussianPosterior {
    Vector mu;
    Matrix Sigma;
    double log_det_sigma = 0.0;
    InversionRoute route = InversionRoute::direct;
};

// Posterior of beta for the quadratic form
//   -1/2 sum_i w_i (r_i - x_i^T beta)^2 - 1/2 sum_j d_j beta_j^2,
// given X, the weighted response w .* r and w, d. Sigma = (X^T W X + D)^-1
// is formed directly (p x p) or, when n < p and D is invertible, through
// the Woodbury identity with an n x n inner solve. log|Sigma| comes from the
// Cholesky factor of whichever matrix was inverted.
GaussianPosterior gaussian_posterior(const Matrix& X, const Vector& weighted_response, const Vector& weights,
                                     const Vector& prior_precision, InversionRoute route = InversionRoute::automatic);

// Sigma = (E[tau] X^T X + D)^-1, mu = E[tau] Sigma X^T y with D = diag(E[gamma_g(j)]).
void update_beta_multivariate(MultivariateState& state, const Dataset& data, const GroupPartition& groups,
                              InversionRoute route = InversionRoute::automatic);

double compute_elbo_multivariate(const MultivariateState& state, const Dataset& data, const GroupPartition& groups,
                                 const HyperPriors& hyper);

// beta block, tau, gamma, ELBO.
double multivariate_sweep(MultivariateState& state, const Dataset& data, const GroupPartition& groups,
                          const HyperPriors& hyper, InversionRoute route = InversionRoute::automatic);

struct MultivariateFit {
    FitSummary summary;
    MultivariateState state;
};

// Requires config.dense_only; the spike-and-slab prior has no multivariate
// derivation and raises UnsupportedError.
MultivariateFit fit_linear_multivariate(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                                        const FitConfig& config);

// Logistic variant: per-sample precisions 2 eta(xi_i) replace E[tau].
void update_xi_multivariate(MultivariateState& state, const Dataset& data);
double compute_logistic_bound_multivariate(const MultivariateState& state, const Dataset& data,
                                           const GroupPartition& groups, const HyperPriors& hyper);
double logistic_multivariate_sweep(MultivariateState& state, const Dataset& data, const GroupPartition& groups,
                                   const HyperPriors& hyper, InversionRoute route = InversionRoute::automatic);
MultivariateFit fit_logistic_multivariate(const Dataset& data, const GroupPartition& groups,
                                          const HyperPriors& hyper, const FitConfig& config);

}  // namespace graper
