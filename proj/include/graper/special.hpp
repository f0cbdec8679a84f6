#pragma once

namespace graper {

/// Digamma function psi(x) = d/dx log Gamma(x) for x > 0.
///
/// Shifts the argument upward with psi(x) = psi(x + 1) - 1/x until x >= 6,
/// then applies the asymptotic series. Absolute error is below 1e-10 on
/// [1e-6, 1e8]. Throws DomainError for x <= 0 or non-finite x.
double digamma(double x);

double log_gamma(double x);
double log_beta(double a, double b);

double sigmoid(double z);
double log_sigmoid(double z);

// Entropies of the variational families, parameterised as in the model
// (Gamma by shape/rate).
double gamma_entropy(double shape, double rate);
double beta_entropy(double a, double b);
double bernoulli_entropy(double p);
double normal_entropy(double variance);

}  // namespace graper
