#include "graper/multivariate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "graper/detail/fit_common.hpp"
#include "graper/errors.hpp"
#include "graper/log.hpp"
#include "graper/logistic.hpp"
#include "graper/preprocess.hpp"
#include "graper/special.hpp"

namespace graper {

namespace {

const double log_2pi = std::log(2.0 * std::numbers::pi);

// Cholesky factor with a conditioning report on failure.
Eigen::LLT<Matrix> factorize(const Matrix& A, const char* what) {
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) {
        const Vector diag = A.diagonal();
        std::ostringstream msg;
        msg << what << " is not positive definite (diagonal ratio estimate "
            << diag.maxCoeff() / std::max(diag.minCoeff(), 1e-300) << ")";
        throw NumericalError(msg.str());
    }
    return llt;
}

Matrix design(const MultivariateState& state, const Dataset& data) {
    if (!state.has_intercept_term) {
        return data.X;
    }
    Matrix X(data.n(), data.p() + 1);
    X.leftCols(data.p()) = data.X;
    X.col(data.p()).setOnes();
    return X;
}

// Prior precision per coordinate; the intercept coordinate is unpenalized.
Vector prior_precision(const MultivariateState& state, const GroupPartition& groups) {
    const Index p = state.num_features();
    Vector d(state.mu.size());
    for (Index j = 0; j < p; ++j) {
        const int k = groups.group_of(j);
        d[j] = state.alpha_gamma[k] / state.beta_gamma[k];
    }
    if (state.has_intercept_term) {
        d[p] = 0.0;
    }
    return d;
}

void update_gamma_multivariate(MultivariateState& state, const GroupPartition& groups, const HyperPriors& hyper) {
    const int G = groups.num_groups();
    state.beta_gamma = Vector::Constant(G, hyper.d_gamma);
    for (int k = 0; k < G; ++k) {
        state.alpha_gamma[k] = hyper.r_gamma + 0.5 * static_cast<double>(groups.size(k));
    }
    for (Index j = 0; j < state.num_features(); ++j) {
        state.beta_gamma[groups.group_of(j)] += 0.5 * (state.mu[j] * state.mu[j] + state.Sigma(j, j));
    }
}

// Coefficient prior, gamma prior and the entropies of q(beta), q(gamma).
double prior_and_entropy_terms(const MultivariateState& state, const GroupPartition& groups,
                               const HyperPriors& hyper) {
    double total = 0.0;
    const int G = groups.num_groups();
    Vector e_gamma(G), e_log_gamma(G);
    for (int k = 0; k < G; ++k) {
        e_gamma[k] = state.alpha_gamma[k] / state.beta_gamma[k];
        e_log_gamma[k] = digamma(state.alpha_gamma[k]) - std::log(state.beta_gamma[k]);
        total += (hyper.r_gamma - 1.0) * e_log_gamma[k] - hyper.d_gamma * e_gamma[k] - log_gamma(hyper.r_gamma) +
                 hyper.r_gamma * std::log(hyper.d_gamma);
        total += gamma_entropy(state.alpha_gamma[k], state.beta_gamma[k]);
    }
    for (Index j = 0; j < state.num_features(); ++j) {
        const int k = groups.group_of(j);
        const double second = state.mu[j] * state.mu[j] + state.Sigma(j, j);
        total += 0.5 * e_log_gamma[k] - 0.5 * e_gamma[k] * second - 0.5 * log_2pi;
    }
    const double dim = static_cast<double>(state.mu.size());
    total += 0.5 * dim * (log_2pi + 1.0) + 0.5 * state.log_det_sigma;
    return total;
}

// Per-row x_i^T Sigma x_i.
Vector quadratic_forms(const Matrix& X, const Matrix& Sigma) { return (X * Sigma).cwiseProduct(X).rowwise().sum(); }

void check_groups(const Dataset& data, const GroupPartition& groups) {
    if (groups.num_features() != data.p()) {
        throw InputError("group partition covers " + std::to_string(groups.num_features()) +
                         " features, data has " + std::to_string(data.p()));
    }
    if (groups.has_singletons()) {
        warn("single-feature groups give unreliable group-level hyperparameter estimates");
    }
}

MultivariateState initial_multivariate_state(Index n, Index p, int G, bool has_tau, bool intercept) {
    MultivariateState s;
    s.has_tau = has_tau;
    s.has_intercept_term = intercept;
    const Index dim = p + (intercept ? 1 : 0);
    s.mu = Vector::Zero(dim);
    s.Sigma = Matrix::Identity(dim, dim);
    s.alpha_gamma = Vector::Ones(G);
    s.beta_gamma = Vector::Ones(G);
    if (!has_tau) {
        s.xi = Vector::Ones(n);
    }
    return s;
}

FitSummary summarize_multivariate(const MultivariateState& s, const GroupPartition& groups,
                                  const PreprocessTransform& transform, ModelKind model, bool converged,
                                  const std::vector<std::string>& feature_names) {
    const Index p = s.num_features();
    FitSummary out;
    out.model = model;
    out.factorization = Factorization::multivariate;
    out.dense = true;
    out.beta_hat = s.mu.head(p);
    out.inclusion_prob = Vector::Ones(p);
    out.gamma_hat = s.alpha_gamma.cwiseQuotient(s.beta_gamma);
    out.pi_hat = Vector::Ones(groups.num_groups());
    out.tau_hat = s.has_tau ? s.alpha_tau / s.beta_tau : std::nan("");
    out.n_iterations = static_cast<int>(s.elbo_trace.size());
    out.converged = converged;
    out.final_elbo = s.elbo_trace.empty() ? std::nan("") : s.elbo_trace.back();
    out.transform = transform;
    out.feature_names = feature_names;
    detail::set_original_intercept(out, s.has_intercept_term ? s.mu[p] : 0.0);
    return out;
}

template <class Sweep>
bool run_loop(std::vector<double>& trace, const FitConfig& config, Sweep&& sweep) {
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        try {
            sweep();
        } catch (const NumericalError& err) {
            throw NumericalError(err.what(), iter);
        }
        if (iter >= config.min_iter && detail::elbo_converged(trace, config.elbo_rel_tol)) {
            return true;
        }
    }
    return false;
}

}  // namespace

void MultivariateState::validate() const {
    if (Sigma.rows() != mu.size() || Sigma.cols() != mu.size()) {
        throw InvalidStateError("covariance dimension does not match the mean");
    }
    if ((Sigma.diagonal().array() <= 0.0).any()) {
        throw InvalidStateError("covariance diagonal must be positive");
    }
    if ((alpha_gamma.array() <= 0.0).any() || (beta_gamma.array() <= 0.0).any()) {
        throw InvalidStateError("gamma parameters must be positive");
    }
    if (has_tau && !(alpha_tau > 0.0 && beta_tau > 0.0)) {
        throw InvalidStateError("tau parameters must be positive");
    }
}

GaussianPosterior gaussian_posterior(const Matrix& X, const Vector& weighted_response, const Vector& weights,
                                     const Vector& prior_precision, InversionRoute route) {
    const Index n = X.rows();
    const Index p = X.cols();
    if (weighted_response.size() != n || weights.size() != n || prior_precision.size() != p) {
        throw InputError("posterior inputs have inconsistent dimensions");
    }
    if ((weights.array() <= 0.0).any()) {
        throw NumericalError("likelihood precisions must be positive");
    }
    const bool invertible_prior = (prior_precision.array() > 0.0).all();
    if (route == InversionRoute::automatic) {
        route = (n < p && invertible_prior) ? InversionRoute::woodbury : InversionRoute::direct;
    }
    if (route == InversionRoute::woodbury && !invertible_prior) {
        throw InputError("the Woodbury route needs a strictly positive prior precision");
    }

    GaussianPosterior post;
    post.route = route;
    const Vector rhs = X.transpose() * weighted_response;
    if (route == InversionRoute::direct) {
        Matrix A = X.transpose() * weights.asDiagonal() * X;
        A.diagonal() += prior_precision;
        const Eigen::LLT<Matrix> llt = factorize(A, "posterior precision");
        post.Sigma = llt.solve(Matrix::Identity(p, p));
        post.log_det_sigma = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
    } else {
        const Vector prior_var = prior_precision.cwiseInverse();
        const Matrix U = X * prior_var.asDiagonal();  // X D^-1
        Matrix M = U * X.transpose();
        M.diagonal() += weights.cwiseInverse();
        const Eigen::LLT<Matrix> llt = factorize(M, "Woodbury inner matrix");
        post.Sigma = -U.transpose() * llt.solve(U);
        post.Sigma.diagonal() += prior_var;
        post.log_det_sigma = -(prior_precision.array().log().sum() + weights.array().log().sum() +
                               2.0 * llt.matrixLLT().diagonal().array().log().sum());
    }
    post.Sigma = 0.5 * (post.Sigma + post.Sigma.transpose()).eval();
    post.mu = post.Sigma * rhs;
    return post;
}

void update_beta_multivariate(MultivariateState& state, const Dataset& data, const GroupPartition& groups,
                              InversionRoute route) {
    state.validate();
    const double e_tau = state.alpha_tau / state.beta_tau;
    const Matrix X = design(state, data);
    GaussianPosterior post = gaussian_posterior(X, e_tau * data.y, Vector::Constant(data.n(), e_tau),
                                                prior_precision(state, groups), route);
    state.mu = std::move(post.mu);
    state.Sigma = std::move(post.Sigma);
    state.log_det_sigma = post.log_det_sigma;
    state.last_route = post.route;
}

double compute_elbo_multivariate(const MultivariateState& state, const Dataset& data, const GroupPartition& groups,
                                 const HyperPriors& hyper) {
    const double n = static_cast<double>(data.n());
    const double e_tau = state.alpha_tau / state.beta_tau;
    const double e_log_tau = digamma(state.alpha_tau) - std::log(state.beta_tau);
    const double ess = (data.y - data.X * state.mu).squaredNorm() + quadratic_forms(data.X, state.Sigma).sum();

    double elbo = 0.5 * n * e_log_tau - 0.5 * e_tau * ess - 0.5 * n * log_2pi;
    elbo += (hyper.r_tau - 1.0) * e_log_tau - hyper.d_tau * e_tau - log_gamma(hyper.r_tau) +
            hyper.r_tau * std::log(hyper.d_tau);
    elbo += gamma_entropy(state.alpha_tau, state.beta_tau);
    elbo += prior_and_entropy_terms(state, groups, hyper);
    if (!std::isfinite(elbo)) {
        throw NumericalError("ELBO is not finite");
    }
    return elbo;
}

double multivariate_sweep(MultivariateState& state, const Dataset& data, const GroupPartition& groups,
                          const HyperPriors& hyper, InversionRoute route) {
    update_beta_multivariate(state, data, groups, route);

    const double ess = (data.y - data.X * state.mu).squaredNorm() + quadratic_forms(data.X, state.Sigma).sum();
    state.alpha_tau = hyper.r_tau + 0.5 * static_cast<double>(data.n());
    state.beta_tau = hyper.d_tau + 0.5 * ess;
    if (!(state.beta_tau > 0.0) || !std::isfinite(state.beta_tau)) {
        throw NumericalError("tau rate parameter is not positive");
    }
    update_gamma_multivariate(state, groups, hyper);

    const double elbo = compute_elbo_multivariate(state, data, groups, hyper);
    state.elbo_trace.push_back(elbo);
    return elbo;
}

MultivariateFit fit_linear_multivariate(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                                        const FitConfig& config) {
    config.validate();
    if (!config.dense_only) {
        throw UnsupportedError(
            "the multivariate factorization is only derived for the dense model; enable dense mode (--dense)");
    }
    hyper.validate();
    data.validate(ResponseKind::continuous);
    check_groups(data, groups);

    PreparedData prepared =
        preprocess(data, PreprocessOptions{config.standardize, config.intercept}, ResponseKind::continuous);
    MultivariateState state = initial_multivariate_state(data.n(), data.p(), groups.num_groups(), true, false);
    const bool converged = run_loop(state.elbo_trace, config,
                                    [&] { multivariate_sweep(state, prepared.data, groups, hyper); });

    MultivariateFit fit;
    fit.summary = summarize_multivariate(state, groups, prepared.transform, ModelKind::linear, converged,
                                         data.feature_names);
    fit.state = std::move(state);
    return fit;
}

void update_xi_multivariate(MultivariateState& state, const Dataset& data) {
    const Matrix X = design(state, data);
    const Vector mean = X * state.mu;
    const Vector radicand = mean.array().square() + quadratic_forms(X, state.Sigma).array();
    if ((radicand.array() < 0.0).any() || !radicand.allFinite()) {
        throw NumericalError("xi update produced an invalid second moment");
    }
    state.xi = radicand.cwiseSqrt();
}

double compute_logistic_bound_multivariate(const MultivariateState& state, const Dataset& data,
                                           const GroupPartition& groups, const HyperPriors& hyper) {
    const Matrix X = design(state, data);
    const Vector mean = X * state.mu;
    const Vector variance = quadratic_forms(X, state.Sigma);
    double bound = 0.0;
    for (Index i = 0; i < data.n(); ++i) {
        const double xi = state.xi[i];
        const double eta_i = eta(xi);
        bound += (data.y[i] - 0.5) * mean[i] - eta_i * (mean[i] * mean[i] + variance[i]) + log_sigmoid(xi) -
                 0.5 * xi + eta_i * xi * xi;
    }
    bound += prior_and_entropy_terms(state, groups, hyper);
    if (!std::isfinite(bound)) {
        throw NumericalError("logistic bound is not finite");
    }
    return bound;
}

double logistic_multivariate_sweep(MultivariateState& state, const Dataset& data, const GroupPartition& groups,
                                   const HyperPriors& hyper, InversionRoute route) {
    state.validate();
    const LogisticBoundParams bound = LogisticBoundParams::from_xi(state.xi, data.y);
    const Matrix X = design(state, data);
    const Vector weighted_response = data.y.array() - 0.5;
    GaussianPosterior post =
        gaussian_posterior(X, weighted_response, bound.pseudo_precision, prior_precision(state, groups), route);
    state.mu = std::move(post.mu);
    state.Sigma = std::move(post.Sigma);
    state.log_det_sigma = post.log_det_sigma;
    state.last_route = post.route;

    update_gamma_multivariate(state, groups, hyper);
    update_xi_multivariate(state, data);

    const double value = compute_logistic_bound_multivariate(state, data, groups, hyper);
    state.elbo_trace.push_back(value);
    return value;
}

MultivariateFit fit_logistic_multivariate(const Dataset& data, const GroupPartition& groups,
                                          const HyperPriors& hyper, const FitConfig& config) {
    config.validate();
    if (!config.dense_only) {
        throw UnsupportedError(
            "the multivariate factorization is only derived for the dense model; enable dense mode (--dense)");
    }
    hyper.validate();
    data.validate(ResponseKind::binary);
    check_groups(data, groups);

    PreparedData prepared =
        preprocess(data, PreprocessOptions{config.standardize, config.intercept}, ResponseKind::binary);
    MultivariateState state =
        initial_multivariate_state(data.n(), data.p(), groups.num_groups(), false, config.intercept);
    const bool converged = run_loop(state.elbo_trace, config,
                                    [&] { logistic_multivariate_sweep(state, prepared.data, groups, hyper); });

    MultivariateFit fit;
    fit.summary = summarize_multivariate(state, groups, prepared.transform, ModelKind::logistic, converged,
                                         data.feature_names);
    fit.state = std::move(state);
    return fit;
}

}  // namespace graper
