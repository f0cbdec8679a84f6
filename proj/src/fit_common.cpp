#include "graper/detail/fit_common.hpp"

#include <cmath>
#include <numbers>

#include "graper/rng.hpp"
#include "graper/special.hpp"

namespace graper::detail {

VariationalState initial_state(const Matrix& X, const GroupPartition& groups, std::uint64_t seed, bool dense,
                               bool has_tau) {
    const Index p = X.cols();
    const int G = groups.num_groups();

    VariationalState s;
    s.dense = dense;
    s.has_tau = has_tau;
    Rng rng(seed);
    s.mu.resize(p);
    for (Index j = 0; j < p; ++j) {
        s.mu[j] = rng.normal();
    }
    s.sigma2 = Vector::Ones(p);
    s.psi = Vector::Ones(p);
    s.alpha_gamma = Vector::Ones(G);
    s.beta_gamma = Vector::Ones(G);
    s.alpha_pi = Vector::Ones(G);
    s.beta_pi = Vector::Ones(G);
    s.alpha_tau = 1.0;
    s.beta_tau = 1.0;
    s.resync_cache(X);
    return s;
}

double coefficient_prior_terms(const VariationalState& s, const ExpectationBundle& e, const GroupPartition& groups,
                               const HyperPriors& hyper) {
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    const Index p = s.p();
    const int G = groups.num_groups();

    double total = 0.0;
    for (Index j = 0; j < p; ++j) {
        const int k = groups.group_of(j);
        // E log p(b_j | gamma)
        total += 0.5 * e.log_gamma[k] - 0.5 * e.gamma[k] * e.b2[j] - 0.5 * log_2pi;
        if (s.dense) {
            total += normal_entropy(s.sigma2[j]);
        } else {
            const double psi = s.psi[j];
            // E log p(s_j | pi) and H(q(b_j, s_j)) as a Bernoulli mixture of normals
            total += psi * e.log_pi[k] + (1.0 - psi) * e.log_one_minus_pi[k];
            total += bernoulli_entropy(psi) + psi * normal_entropy(s.sigma2[j]);
            if (psi < 1.0) {
                total += (1.0 - psi) * normal_entropy(1.0 / e.gamma[k]);
            }
        }
    }
    const double gamma_norm = -log_gamma(hyper.r_gamma) + hyper.r_gamma * std::log(hyper.d_gamma);
    const double pi_norm = -log_beta(hyper.d_pi, hyper.r_pi);
    for (int k = 0; k < G; ++k) {
        total += (hyper.r_gamma - 1.0) * e.log_gamma[k] - hyper.d_gamma * e.gamma[k] + gamma_norm;
        total += gamma_entropy(s.alpha_gamma[k], s.beta_gamma[k]);
        if (!s.dense) {
            total += (hyper.d_pi - 1.0) * e.log_pi[k] + (hyper.r_pi - 1.0) * e.log_one_minus_pi[k] + pi_norm;
            total += beta_entropy(s.alpha_pi[k], s.beta_pi[k]);
        }
    }
    return total;
}

Vector coefficient_variances(const VariationalState& s) {
    const Vector second = s.psi.array() * (s.mu.array().square() + s.sigma2.array());
    const Vector first = s.psi.cwiseProduct(s.mu);
    return (second.array() - first.array().square()).max(0.0);
}

void set_original_intercept(FitSummary& summary, double fitted_intercept) {
    const PreprocessTransform& t = summary.transform;
    summary.intercept = t.response_mean + fitted_intercept - summary.original_coefficients().dot(t.feature_means);
}

FitSummary summarize(const VariationalState& s, const GroupPartition& groups, const PreprocessTransform& transform,
                     ModelKind model, bool converged, const std::vector<std::string>& feature_names) {
    FitSummary out;
    out.model = model;
    out.factorization = Factorization::full;
    out.dense = s.dense;
    out.beta_hat = s.psi.cwiseProduct(s.mu);
    out.inclusion_prob = s.psi;
    out.gamma_hat = s.alpha_gamma.cwiseQuotient(s.beta_gamma);
    if (s.dense) {
        out.pi_hat = Vector::Ones(groups.num_groups());
    } else {
        out.pi_hat = s.alpha_pi.array() / (s.alpha_pi.array() + s.beta_pi.array());
    }
    out.tau_hat = s.has_tau ? s.alpha_tau / s.beta_tau : std::nan("");
    out.n_iterations = static_cast<int>(s.elbo_trace.size());
    out.converged = converged;
    out.final_elbo = s.elbo_trace.empty() ? std::nan("") : s.elbo_trace.back();
    out.transform = transform;
    out.feature_names = feature_names;
    set_original_intercept(out, s.has_intercept_term ? s.intercept_mean : 0.0);
    return out;
}

bool elbo_converged(const std::vector<double>& trace, double tolerance) {
    if (trace.size() < 2) {
        return false;
    }
    const double current = trace.back();
    const double previous = trace[trace.size() - 2];
    return std::abs(current - previous) < tolerance * std::abs(current);
}

}  // namespace graper::detail
