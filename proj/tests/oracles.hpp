#pragma once

// Second implementations of the objective, written term by term from the
// model definition with Boost special functions. Used only as test oracles.

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "graper/model.hpp"

namespace test {

struct GammaMoments {
    double mean, log_mean, entropy;
};

inline GammaMoments gamma_moments(double a, double b) {
    using boost::math::digamma;
    return {a / b, digamma(a) - std::log(b), a - std::log(b) + std::lgamma(a) + (1.0 - a) * digamma(a)};
}

inline double beta_entropy_ref(double a, double b) {
    using boost::math::digamma;
    return std::log(boost::math::beta(a, b)) - (a - 1.0) * digamma(a) - (b - 1.0) * digamma(b) +
           (a + b - 2.0) * digamma(a + b);
}

inline double normal_entropy_ref(double var) { return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * var); }

inline double bernoulli_entropy_ref(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return h;
}

// Prior and entropy terms shared by the linear and logistic objectives.
inline double coefficient_terms_ref(const graper::VariationalState& s, const graper::GroupPartition& g,
                                    const graper::HyperPriors& h) {
    using boost::math::digamma;
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    double total = 0.0;
    for (int k = 0; k < g.num_groups(); ++k) {
        const GammaMoments gm = gamma_moments(s.alpha_gamma[k], s.beta_gamma[k]);
        total += (h.r_gamma - 1.0) * gm.log_mean - h.d_gamma * gm.mean - std::lgamma(h.r_gamma) +
                 h.r_gamma * std::log(h.d_gamma);
        total += gm.entropy;
        if (!s.dense) {
            const double a = s.alpha_pi[k], b = s.beta_pi[k];
            const double elog = digamma(a) - digamma(a + b);
            const double elog1m = digamma(b) - digamma(a + b);
            total += (h.d_pi - 1.0) * elog + (h.r_pi - 1.0) * elog1m - std::log(boost::math::beta(h.d_pi, h.r_pi));
            total += beta_entropy_ref(a, b);
        }
    }
    for (graper::Index j = 0; j < s.mu.size(); ++j) {
        const int k = g.group_of(j);
        const GammaMoments gm = gamma_moments(s.alpha_gamma[k], s.beta_gamma[k]);
        const double psi = s.psi[j];
        const double eb2 = (1.0 - psi) / gm.mean + psi * (s.mu[j] * s.mu[j] + s.sigma2[j]);
        total += 0.5 * gm.log_mean - 0.5 * gm.mean * eb2 - 0.5 * log_2pi;
        if (s.dense) {
            total += normal_entropy_ref(s.sigma2[j]);
        } else {
            const double a = s.alpha_pi[k], b = s.beta_pi[k];
            total += psi * (digamma(a) - digamma(a + b)) + (1.0 - psi) * (digamma(b) - digamma(a + b));
            total += bernoulli_entropy_ref(psi) + psi * normal_entropy_ref(s.sigma2[j]) +
                     (1.0 - psi) * normal_entropy_ref(1.0 / gm.mean);
        }
    }
    return total;
}

// E||y - X beta||^2 by explicit double loops.
inline double expected_rss_ref(const graper::VariationalState& s, const graper::Matrix& X, const graper::Vector& y) {
    double total = 0.0;
    for (graper::Index i = 0; i < X.rows(); ++i) {
        double mean = 0.0, var = 0.0;
        for (graper::Index j = 0; j < X.cols(); ++j) {
            const double m = s.psi[j] * s.mu[j];
            const double v = s.psi[j] * (s.mu[j] * s.mu[j] + s.sigma2[j]) - m * m;
            mean += X(i, j) * m;
            var += X(i, j) * X(i, j) * v;
        }
        total += (y[i] - mean) * (y[i] - mean) + var;
    }
    return total;
}

inline double linear_elbo_ref(const graper::VariationalState& s, const graper::Matrix& X, const graper::Vector& y,
                              const graper::GroupPartition& g, const graper::HyperPriors& h) {
    const double n = static_cast<double>(X.rows());
    const GammaMoments tau = gamma_moments(s.alpha_tau, s.beta_tau);
    const double lik = 0.5 * n * tau.log_mean - 0.5 * tau.mean * expected_rss_ref(s, X, y) -
                       0.5 * n * std::log(2.0 * std::numbers::pi);
    const double tau_prior =
        (h.r_tau - 1.0) * tau.log_mean - h.d_tau * tau.mean - std::lgamma(h.r_tau) + h.r_tau * std::log(h.d_tau);
    return lik + tau_prior + tau.entropy + coefficient_terms_ref(s, g, h);
}

}  // namespace test
