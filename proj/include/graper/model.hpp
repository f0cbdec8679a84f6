#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace graper {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ResponseKind { continuous, binary };
enum class ModelKind { linear, logistic };
enum class Factorization { full, multivariate };

inline ResponseKind response_kind(ModelKind model) {
    return model == ModelKind::linear ? ResponseKind::continuous : ResponseKind::binary;
}

// Observed design matrix and response.
struct Dataset {
    Matrix X;
    Vector y;
    std::vector<std::string> feature_names;
    std::vector<std::string> sample_ids;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }

    // Throws InputError on empty data, non-finite values, length mismatches
    // or (for binary responses) labels outside {0, 1}.
    void validate(ResponseKind kind) const;

    // Rows selected by index, names carried along.
    Dataset subset_rows(const std::vector<Index>& rows) const;
};

// Surjective map from feature index to group index. Groups are 0-based here;
// `labels` keeps the user-facing names in first-appearance order.
class GroupPartition {
public:
    GroupPartition() = default;
    explicit GroupPartition(std::vector<int> assignment, std::vector<std::string> labels = {});

    static GroupPartition single_group(Index p);
    // G consecutive blocks of equal size; p must be divisible by G.
    static GroupPartition contiguous(Index p, int num_groups);

    int num_groups() const { return static_cast<int>(sizes_.size()); }
    Index num_features() const { return static_cast<Index>(assignment_.size()); }
    int group_of(Index j) const { return assignment_[static_cast<std::size_t>(j)]; }
    Index size(int k) const { return sizes_[static_cast<std::size_t>(k)]; }

    const std::vector<int>& assignment() const { return assignment_; }
    const std::vector<Index>& sizes() const { return sizes_; }
    const std::vector<std::string>& labels() const { return labels_; }

    std::vector<Index> members(int k) const;
    bool has_singletons() const;

private:
    std::vector<int> assignment_;
    std::vector<Index> sizes_;
    std::vector<std::string> labels_;
};

// Gamma priors are shape/rate: tau ~ Gamma(r_tau, d_tau), gamma_k ~ Gamma(r_gamma, d_gamma);
// pi_k ~ Beta(d_pi, r_pi).
struct HyperPriors {
    double r_tau = 1e-3;
    double d_tau = 1e-3;
    double r_gamma = 1e-3;
    double d_gamma = 1e-3;
    double d_pi = 1.0;
    double r_pi = 1.0;

    void validate() const;
};

// All variational parameters of the fully factorized model.
//
// q(b_j, s_j) = psi_j N(b_j | mu_j, sigma2_j) + (1 - psi_j) N(b_j | 0, 1 / E[gamma_g(j)]),
// q(gamma_k) = Gamma(alpha_gamma_k, beta_gamma_k), q(pi_k) = Beta(alpha_pi_k, beta_pi_k),
// q(tau) = Gamma(alpha_tau, beta_tau). `v` caches X * E[beta].
struct VariationalState {
    Vector mu;
    Vector sigma2;
    Vector psi;
    Vector alpha_gamma;
    Vector beta_gamma;
    Vector alpha_pi;
    Vector beta_pi;
    double alpha_tau = 1.0;
    double beta_tau = 1.0;

    // Logistic model only: Jaakkola-Jordan parameters and the unpenalized
    // intercept N(intercept_mean, intercept_var).
    Vector xi;
    bool has_intercept_term = false;
    double intercept_mean = 0.0;
    double intercept_var = 0.0;

    Vector v;
    std::vector<double> elbo_trace;

    bool dense = false;    // pi and s dropped, psi fixed at 1
    bool has_tau = true;   // false for the logistic likelihood

    Index p() const { return mu.size(); }
    Index n() const { return v.size(); }

    // Throws InvalidStateError when any invariant is broken.
    void validate() const;
    Vector expected_beta() const { return psi.cwiseProduct(mu); }
    void resync_cache(const Matrix& X) { v.noalias() = X * expected_beta(); }
};

// Expectations under q needed by the updates and the bound.
struct ExpectationBundle {
    double tau = 0.0;      // NaN when the state has no tau
    double log_tau = 0.0;
    Vector gamma;          // per group
    Vector log_gamma;
    Vector logit_pi;       // E log(pi / (1 - pi))
    Vector log_pi;
    Vector log_one_minus_pi;
    Vector s;              // per feature
    Vector b;
    Vector b2;
    Vector beta;
    Vector beta2;
};

ExpectationBundle expected_values(const VariationalState& state, const GroupPartition& groups);

// Centering and scaling applied before fitting, kept so that predictions
// can be made on raw features.
struct PreprocessTransform {
    Vector feature_means;
    Vector feature_sds;
    double response_mean = 0.0;
    bool standardized = false;
    bool centered = false;

    Matrix apply(const Matrix& X) const;
    Matrix invert(const Matrix& Z) const;
};

// Point estimates of a finished fit. beta_hat is on the fitted (transformed)
// feature scale; original_coefficients() maps it back to raw features.
struct FitSummary {
    ModelKind model = ModelKind::linear;
    Factorization factorization = Factorization::full;
    bool dense = false;

    Vector beta_hat;
    Vector inclusion_prob;
    Vector gamma_hat;
    Vector pi_hat;
    double tau_hat = 0.0;
    double intercept = 0.0;  // on the original response/feature scale

    int n_iterations = 0;
    bool converged = false;
    double final_elbo = 0.0;

    PreprocessTransform transform;
    std::vector<std::string> feature_names;

    Vector original_coefficients() const { return beta_hat.cwiseQuotient(transform.feature_sds); }
    // intercept + X_raw * original_coefficients(); checks the column count.
    Vector linear_predictor(const Matrix& X_new) const;
};

}  // namespace graper
