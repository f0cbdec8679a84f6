#include "graper/logistic.hpp"

#include <cmath>

#include "graper/detail/coefficient_update.hpp"
#include "graper/detail/fit_common.hpp"
#include "graper/errors.hpp"
#include "graper/log.hpp"
#include "graper/preprocess.hpp"
#include "graper/special.hpp"

namespace graper {

namespace {
constexpr double eta_series_threshold = 1e-4;
}

double eta(double xi) {
    if (!(xi >= 0.0)) {
        throw DomainError("eta: xi must be non-negative");
    }
    if (xi < eta_series_threshold) {
        const double x2 = xi * xi;
        return 0.125 - x2 / 96.0 + x2 * x2 / 960.0;
    }
    // sigmoid(xi) - 1/2 = tanh(xi / 2) / 2
    return std::tanh(0.5 * xi) / (4.0 * xi);
}

double sigmoid_lower_bound(double z, double xi) {
    return std::exp(log_sigmoid(xi) + 0.5 * (z - xi) - eta(xi) * (z * z - xi * xi));
}

LogisticBoundParams LogisticBoundParams::from_xi(const Vector& xi, const Vector& y) {
    if (xi.size() != y.size()) {
        throw InputError("xi and response lengths differ");
    }
    LogisticBoundParams b;
    b.xi = xi;
    b.eta.resize(xi.size());
    for (Index i = 0; i < xi.size(); ++i) {
        b.eta[i] = graper::eta(xi[i]);
    }
    b.pseudo_precision = 2.0 * b.eta;
    b.pseudo_y = (2.0 * y.array() - 1.0) / (4.0 * b.eta.array());
    return b;
}

void update_coefficient_logistic(Index j, VariationalState& state, const Dataset& data, const GroupPartition& groups,
                                 const ExpectationBundle& e, const LogisticBoundParams& bound) {
    const int k = groups.group_of(j);
    detail::update_coefficient(j, state, data.X, bound.pseudo_y, bound.pseudo_precision, e.gamma[k], e.logit_pi[k]);
}

namespace {

// E[(x_i^T beta + intercept)^2] split into squared mean and variance.
void linear_predictor_moments(const VariationalState& state, const Dataset& data, Vector& mean, Vector& variance) {
    mean = state.v.array() + state.intercept_mean;
    variance = data.X.array().square().matrix() * detail::coefficient_variances(state);
    if (state.has_intercept_term) {
        variance.array() += state.intercept_var;
    }
}

}  // namespace

void update_xi(VariationalState& state, const Dataset& data) {
    Vector mean, variance;
    linear_predictor_moments(state, data, mean, variance);
    const Vector radicand = mean.array().square() + variance.array();
    if ((radicand.array() < 0.0).any() || !radicand.allFinite()) {
        throw NumericalError("xi update produced an invalid second moment");
    }
    state.xi = radicand.cwiseSqrt();
}

double compute_logistic_bound(const VariationalState& state, const Dataset& data, const GroupPartition& groups,
                              const HyperPriors& hyper) {
    const ExpectationBundle e = expected_values(state, groups);
    Vector mean, variance;
    linear_predictor_moments(state, data, mean, variance);

    double likelihood = 0.0;
    for (Index i = 0; i < data.n(); ++i) {
        const double xi = state.xi[i];
        const double eta_i = eta(xi);
        const double second = mean[i] * mean[i] + variance[i];
        likelihood += (data.y[i] - 0.5) * mean[i] - eta_i * second + log_sigmoid(xi) - 0.5 * xi + eta_i * xi * xi;
    }
    double bound = likelihood + detail::coefficient_prior_terms(state, e, groups, hyper);
    if (state.has_intercept_term) {
        bound += normal_entropy(state.intercept_var);
    }
    if (!std::isfinite(bound)) {
        throw NumericalError("logistic bound is not finite");
    }
    return bound;
}

double logistic_sweep(VariationalState& state, const Dataset& data, const GroupPartition& groups,
                      const HyperPriors& hyper) {
    if (!state.dense) {
        update_pi(state, groups, hyper);
    }
    ExpectationBundle e = expected_values(state, groups);
    const LogisticBoundParams bound = LogisticBoundParams::from_xi(state.xi, data.y);
    if (state.has_intercept_term) {
        detail::update_intercept(state, bound.pseudo_y, bound.pseudo_precision);
    }
    for (Index j = 0; j < state.p(); ++j) {
        update_coefficient_logistic(j, state, data, groups, e, bound);
    }
    e = expected_values(state, groups);
    update_gamma(state, groups, e, hyper);
    update_xi(state, data);

    const double value = compute_logistic_bound(state, data, groups, hyper);
    state.elbo_trace.push_back(value);
    return value;
}

LogisticFit fit_logistic(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                         const FitConfig& config) {
    config.validate();
    hyper.validate();
    data.validate(ResponseKind::binary);
    if (groups.num_features() != data.p()) {
        throw InputError("group partition covers " + std::to_string(groups.num_features()) +
                         " features, data has " + std::to_string(data.p()));
    }
    if (groups.has_singletons()) {
        warn("single-feature groups give unreliable group-level hyperparameter estimates");
    }

    PreparedData prepared =
        preprocess(data, PreprocessOptions{config.standardize, config.intercept}, ResponseKind::binary);
    VariationalState state =
        detail::initial_state(prepared.data.X, groups, config.seed, config.dense_only, /*has_tau=*/false);
    state.xi = Vector::Ones(data.n());
    state.has_intercept_term = config.intercept;
    state.intercept_var = 1.0;

    bool converged = false;
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        try {
            logistic_sweep(state, prepared.data, groups, hyper);
        } catch (const NumericalError& err) {
            throw NumericalError(err.what(), iter);
        }
        if (iter >= config.min_iter && detail::elbo_converged(state.elbo_trace, config.elbo_rel_tol)) {
            converged = true;
            break;
        }
    }

    LogisticFit fit;
    fit.summary = detail::summarize(state, groups, prepared.transform, ModelKind::logistic, converged,
                                    data.feature_names);
    fit.state = std::move(state);
    return fit;
}

Vector predict_logistic(const FitSummary& summary, const Matrix& X_new, bool classify) {
    Vector out = summary.linear_predictor(X_new);
    for (Index i = 0; i < out.size(); ++i) {
        out[i] = classify ? (out[i] > 0.0 ? 1.0 : 0.0) : sigmoid(out[i]);
    }
    return out;
}

}  // namespace graper
