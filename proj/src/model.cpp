#include "graper/model.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>

#include "graper/errors.hpp"
#include "graper/log.hpp"
#include "graper/special.hpp"

namespace graper {

namespace {

std::mutex warning_mutex;
WarningHandler warning_handler = [](const std::string& message) { std::cerr << "warning: " << message << '\n'; };

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(warning_mutex);
    std::swap(handler, warning_handler);
    return handler;
}

void warn(const std::string& message) {
    std::lock_guard lock(warning_mutex);
    if (warning_handler) {
        warning_handler(message);
    }
}

void Dataset::validate(ResponseKind kind) const {
    if (n() < 1 || p() < 1) {
        throw InputError("dataset must have at least one sample and one feature");
    }
    if (y.size() != n()) {
        throw InputError("response length " + std::to_string(y.size()) + " does not match " +
                         std::to_string(n()) + " samples");
    }
    if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != p()) {
        throw InputError("feature name count does not match the number of columns");
    }
    if (!sample_ids.empty() && static_cast<Index>(sample_ids.size()) != n()) {
        throw InputError("sample id count does not match the number of rows");
    }
    if (!X.allFinite()) {
        throw InputError("design matrix contains non-finite values");
    }
    if (!y.allFinite()) {
        throw InputError("response contains non-finite values");
    }
    if (kind == ResponseKind::binary) {
        for (Index i = 0; i < n(); ++i) {
            if (y[i] != 0.0 && y[i] != 1.0) {
                throw InputError("binary response must be 0 or 1 (row " + std::to_string(i + 1) + ")");
            }
        }
    }
}

Dataset Dataset::subset_rows(const std::vector<Index>& rows) const {
    Dataset out;
    out.X.resize(static_cast<Index>(rows.size()), p());
    out.y.resize(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.X.row(static_cast<Index>(r)) = X.row(rows[r]);
        out.y[static_cast<Index>(r)] = y[rows[r]];
        if (!sample_ids.empty()) {
            out.sample_ids.push_back(sample_ids[static_cast<std::size_t>(rows[r])]);
        }
    }
    out.feature_names = feature_names;
    return out;
}

GroupPartition::GroupPartition(std::vector<int> assignment, std::vector<std::string> labels)
    : assignment_(std::move(assignment)), labels_(std::move(labels)) {
    if (assignment_.empty()) {
        throw InputError("group partition must cover at least one feature");
    }
    int max_group = -1;
    for (int g : assignment_) {
        if (g < 0) {
            throw InputError("group indices must be non-negative");
        }
        max_group = std::max(max_group, g);
    }
    sizes_.assign(static_cast<std::size_t>(max_group) + 1, 0);
    for (int g : assignment_) {
        ++sizes_[static_cast<std::size_t>(g)];
    }
    for (std::size_t k = 0; k < sizes_.size(); ++k) {
        if (sizes_[k] == 0) {
            throw InputError("group " + std::to_string(k + 1) + " has no features");
        }
    }
    if (labels_.empty()) {
        for (std::size_t k = 0; k < sizes_.size(); ++k) {
            labels_.push_back(std::to_string(k + 1));
        }
    } else if (labels_.size() != sizes_.size()) {
        throw InputError("group label count does not match the number of groups");
    }
}

GroupPartition GroupPartition::single_group(Index p) {
    return GroupPartition(std::vector<int>(static_cast<std::size_t>(p), 0));
}

GroupPartition GroupPartition::contiguous(Index p, int num_groups) {
    if (num_groups < 1 || p % num_groups != 0) {
        throw InputError("p must be divisible by the number of groups");
    }
    const Index block = p / num_groups;
    std::vector<int> assignment(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
        assignment[static_cast<std::size_t>(j)] = static_cast<int>(j / block);
    }
    return GroupPartition(std::move(assignment));
}

std::vector<Index> GroupPartition::members(int k) const {
    std::vector<Index> out;
    for (std::size_t j = 0; j < assignment_.size(); ++j) {
        if (assignment_[j] == k) {
            out.push_back(static_cast<Index>(j));
        }
    }
    return out;
}

bool GroupPartition::has_singletons() const {
    for (Index s : sizes_) {
        if (s == 1) {
            return true;
        }
    }
    return false;
}

void HyperPriors::validate() const {
    for (double value : {r_tau, d_tau, r_gamma, d_gamma, d_pi, r_pi}) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw InputError("hyperprior constants must be positive and finite");
        }
    }
}

void VariationalState::validate() const {
    const auto positive = [](const Vector& x) { return x.size() == 0 || (x.array() > 0.0).all(); };
    if (sigma2.size() != mu.size() || psi.size() != mu.size()) {
        throw InvalidStateError("per-feature parameter vectors differ in length");
    }
    if (!positive(sigma2)) {
        throw InvalidStateError("slab variances must be positive");
    }
    if (psi.size() > 0 && ((psi.array() < 0.0).any() || (psi.array() > 1.0).any())) {
        throw InvalidStateError("inclusion probabilities must lie in [0, 1]");
    }
    if (!positive(alpha_gamma) || !positive(beta_gamma)) {
        throw InvalidStateError("gamma parameters must be positive");
    }
    if (!dense && (!positive(alpha_pi) || !positive(beta_pi))) {
        throw InvalidStateError("pi parameters must be positive");
    }
    if (has_tau && !(alpha_tau > 0.0 && beta_tau > 0.0)) {
        throw InvalidStateError("tau parameters must be positive");
    }
    if (xi.size() > 0 && (xi.array() < 0.0).any()) {
        throw InvalidStateError("xi must be non-negative");
    }
}

ExpectationBundle expected_values(const VariationalState& state, const GroupPartition& groups) {
    state.validate();
    const int G = groups.num_groups();
    const Index p = state.p();
    if (groups.num_features() != p || state.alpha_gamma.size() != G) {
        throw InvalidStateError("state dimensions do not match the group partition");
    }

    ExpectationBundle e;
    if (state.has_tau) {
        e.tau = state.alpha_tau / state.beta_tau;
        e.log_tau = digamma(state.alpha_tau) - std::log(state.beta_tau);
    } else {
        e.tau = std::numeric_limits<double>::quiet_NaN();
        e.log_tau = std::numeric_limits<double>::quiet_NaN();
    }

    e.gamma.resize(G);
    e.log_gamma.resize(G);
    e.logit_pi.setZero(G);
    e.log_pi.setZero(G);
    e.log_one_minus_pi.setZero(G);
    for (int k = 0; k < G; ++k) {
        e.gamma[k] = state.alpha_gamma[k] / state.beta_gamma[k];
        e.log_gamma[k] = digamma(state.alpha_gamma[k]) - std::log(state.beta_gamma[k]);
        if (!state.dense) {
            const double a = state.alpha_pi[k];
            const double b = state.beta_pi[k];
            const double d_ab = digamma(a + b);
            const double d_a = digamma(a);
            const double d_b = digamma(b);
            e.logit_pi[k] = d_a - d_b;
            e.log_pi[k] = d_a - d_ab;
            e.log_one_minus_pi[k] = d_b - d_ab;
        }
    }

    e.s = state.psi;
    e.b.resize(p);
    e.b2.resize(p);
    e.beta.resize(p);
    e.beta2.resize(p);
    for (Index j = 0; j < p; ++j) {
        const double psi = state.psi[j];
        const double slab2 = state.mu[j] * state.mu[j] + state.sigma2[j];
        const double spike2 = (1.0 - psi) / e.gamma[groups.group_of(j)];
        e.b[j] = psi * state.mu[j];
        e.beta[j] = psi * state.mu[j];
        e.beta2[j] = psi * slab2;
        e.b2[j] = spike2 + psi * slab2;
    }
    return e;
}

Vector FitSummary::linear_predictor(const Matrix& X_new) const {
    if (X_new.cols() != beta_hat.size()) {
        throw InputError("prediction matrix has " + std::to_string(X_new.cols()) + " columns, model expects " +
                         std::to_string(beta_hat.size()));
    }
    Vector eta = X_new * original_coefficients();
    eta.array() += intercept;
    return eta;
}

}  // namespace graper
