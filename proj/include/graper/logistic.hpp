#pragma once

#include "graper/linear.hpp"
#include "graper/model.hpp"

namespace graper {

// Curvature of the Jaakkola-Jordan bound, eta(xi) = (sigmoid(xi) - 1/2) / (2 xi),
// with its limit 1/8 at xi = 0. Throws DomainError for negative xi.
double eta(double xi);

// sigmoid(xi) * exp((z - xi) / 2 - eta(xi) (z^2 - xi^2)); never exceeds
// sigmoid(z) and touches it at |z| = xi.
double sigmoid_lower_bound(double z, double xi);

// Quantities derived from xi that turn the bound into a Gaussian term on
// pseudo-data: y~_i = (2 y_i - 1) / (4 eta_i) with precision 2 eta_i.
struct LogisticBoundParams {
    Vector xi;
    Vector eta;
    Vector pseudo_y;
    Vector pseudo_precision;

    static LogisticBoundParams from_xi(const Vector& xi, const Vector& y);
};

void update_coefficient_logistic(Index j, VariationalState& state, const Dataset& data, const GroupPartition& groups,
                                 const ExpectationBundle& e, const LogisticBoundParams& bound);

// xi_i = sqrt(E[(x_i^T beta + intercept)^2]) under the factorized q.
void update_xi(VariationalState& state, const Dataset& data);

// Evidence lower bound with the likelihood replaced by its xi-bound; every
// xi-dependent term is kept, so values are exact lower bounds but are not
// comparable with linear-model ELBOs.
double compute_logistic_bound(const VariationalState& state, const Dataset& data, const GroupPartition& groups,
                              const HyperPriors& hyper);

// pi, intercept, every (b_j, s_j), gamma, xi, then the bound (appended to
// the trace and returned).
double logistic_sweep(VariationalState& state, const Dataset& data, const GroupPartition& groups,
                      const HyperPriors& hyper);

struct LogisticFit {
    FitSummary summary;
    VariationalState state;
};

LogisticFit fit_logistic(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                         const FitConfig& config);

// sigmoid(intercept + x_i^T beta); with `classify` the probabilities are
// thresholded at 1/2 into 0/1 labels.
Vector predict_logistic(const FitSummary& summary, const Matrix& X_new, bool classify = false);

}  // namespace graper
