#pragma once

#include <vector>

#include "graper/linear.hpp"
#include "graper/model.hpp"

namespace graper {

struct ModelSpec {
    ModelKind model = ModelKind::linear;
    Factorization factorization = Factorization::full;
};

struct FitResult {
    FitSummary summary;
    std::vector<double> elbo_trace;
};

// Dispatches to the linear/logistic, factorized/multivariate fitting routine.
FitResult fit_model(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                    const FitConfig& config, const ModelSpec& spec);

// Responses for linear fits, probabilities for logistic fits.
Vector predict(const FitSummary& summary, const Matrix& X_new);

}  // namespace graper
