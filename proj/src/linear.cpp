#include "graper/linear.hpp"

#include <cmath>
#include <numbers>

#include "graper/detail/coefficient_update.hpp"
#include "graper/detail/fit_common.hpp"
#include "graper/errors.hpp"
#include "graper/log.hpp"
#include "graper/preprocess.hpp"
#include "graper/special.hpp"

namespace graper {

void FitConfig::validate() const {
    if (max_iter < 1) {
        throw InputError("max_iter must be at least 1");
    }
    if (min_iter < 1) {
        throw InputError("min_iter must be at least 1");
    }
    if (!(elbo_rel_tol > 0.0) || !std::isfinite(elbo_rel_tol)) {
        throw InputError("elbo_rel_tol must be positive");
    }
}

void update_pi(VariationalState& state, const GroupPartition& groups, const HyperPriors& hyper) {
    const int G = groups.num_groups();
    state.alpha_pi = Vector::Constant(G, hyper.d_pi);
    state.beta_pi = Vector::Constant(G, hyper.r_pi);
    for (Index j = 0; j < state.p(); ++j) {
        const int k = groups.group_of(j);
        state.alpha_pi[k] += state.psi[j];
        state.beta_pi[k] += 1.0 - state.psi[j];
    }
}

void update_spike_slab_coefficient(Index j, VariationalState& state, const Dataset& data,
                                   const GroupPartition& groups, const ExpectationBundle& e) {
    const int k = groups.group_of(j);
    detail::update_coefficient(j, state, data.X, data.y, Vector::Constant(data.n(), e.tau), e.gamma[k],
                               e.logit_pi[k]);
}

double expected_squared_residual(const VariationalState& state, const Dataset& data) {
    const double fit = (data.y - state.v).squaredNorm();
    const Vector column_norms = data.X.colwise().squaredNorm().transpose();
    return fit + column_norms.dot(detail::coefficient_variances(state));
}

void update_tau(VariationalState& state, const Dataset& data, const HyperPriors& hyper) {
    state.alpha_tau = hyper.r_tau + 0.5 * static_cast<double>(data.n());
    state.beta_tau = hyper.d_tau + 0.5 * expected_squared_residual(state, data);
    if (!(state.beta_tau > 0.0) || !std::isfinite(state.beta_tau)) {
        throw NumericalError("tau rate parameter is not positive");
    }
}

void update_gamma(VariationalState& state, const GroupPartition& groups, const ExpectationBundle& e,
                  const HyperPriors& hyper) {
    const int G = groups.num_groups();
    state.beta_gamma = Vector::Constant(G, hyper.d_gamma);
    for (int k = 0; k < G; ++k) {
        state.alpha_gamma[k] = hyper.r_gamma + 0.5 * static_cast<double>(groups.size(k));
    }
    for (Index j = 0; j < state.p(); ++j) {
        state.beta_gamma[groups.group_of(j)] += 0.5 * e.b2[j];
    }
}

double compute_elbo_linear(const VariationalState& state, const Dataset& data, const GroupPartition& groups,
                           const HyperPriors& hyper) {
    const ExpectationBundle e = expected_values(state, groups);
    const double n = static_cast<double>(data.n());
    const double log_2pi = std::log(2.0 * std::numbers::pi);

    const double likelihood =
        0.5 * n * e.log_tau - 0.5 * e.tau * expected_squared_residual(state, data) - 0.5 * n * log_2pi;
    const double tau_prior = (hyper.r_tau - 1.0) * e.log_tau - hyper.d_tau * e.tau - log_gamma(hyper.r_tau) +
                             hyper.r_tau * std::log(hyper.d_tau);
    const double elbo = likelihood + tau_prior + gamma_entropy(state.alpha_tau, state.beta_tau) +
                        detail::coefficient_prior_terms(state, e, groups, hyper);
    if (!std::isfinite(elbo)) {
        throw NumericalError("ELBO is not finite");
    }
    return elbo;
}

double linear_sweep(VariationalState& state, const Dataset& data, const GroupPartition& groups,
                    const HyperPriors& hyper) {
    if (!state.dense) {
        update_pi(state, groups, hyper);
    }
    ExpectationBundle e = expected_values(state, groups);
    for (Index j = 0; j < state.p(); ++j) {
        update_spike_slab_coefficient(j, state, data, groups, e);
    }
    update_tau(state, data, hyper);
    e = expected_values(state, groups);
    update_gamma(state, groups, e, hyper);

    const double elbo = compute_elbo_linear(state, data, groups, hyper);
    state.elbo_trace.push_back(elbo);
    return elbo;
}

LinearFit fit_linear(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                     const FitConfig& config) {
    config.validate();
    hyper.validate();
    data.validate(ResponseKind::continuous);
    if (groups.num_features() != data.p()) {
        throw InputError("group partition covers " + std::to_string(groups.num_features()) +
                         " features, data has " + std::to_string(data.p()));
    }
    if (groups.has_singletons()) {
        warn("single-feature groups give unreliable group-level hyperparameter estimates");
    }

    PreparedData prepared =
        preprocess(data, PreprocessOptions{config.standardize, config.intercept}, ResponseKind::continuous);
    VariationalState state =
        detail::initial_state(prepared.data.X, groups, config.seed, config.dense_only, /*has_tau=*/true);

    bool converged = false;
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        try {
            linear_sweep(state, prepared.data, groups, hyper);
        } catch (const NumericalError& err) {
            throw NumericalError(err.what(), iter);
        }
        if (iter >= config.min_iter && detail::elbo_converged(state.elbo_trace, config.elbo_rel_tol)) {
            converged = true;
            break;
        }
    }

    LinearFit fit;
    fit.summary = detail::summarize(state, groups, prepared.transform, ModelKind::linear, converged,
                                    data.feature_names);
    fit.state = std::move(state);
    return fit;
}

Vector predict_linear(const FitSummary& summary, const Matrix& X_new) { return summary.linear_predictor(X_new); }

}  // namespace graper
