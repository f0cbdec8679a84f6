#include "graper/fit.hpp"

#include "graper/logistic.hpp"
#include "graper/multivariate.hpp"

namespace graper {

FitResult fit_model(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                    const FitConfig& config, const ModelSpec& spec) {
    FitResult out;
    if (spec.factorization == Factorization::multivariate) {
        MultivariateFit fit = spec.model == ModelKind::linear ? fit_linear_multivariate(data, groups, hyper, config)
                                                              : fit_logistic_multivariate(data, groups, hyper, config);
        out.summary = std::move(fit.summary);
        out.elbo_trace = std::move(fit.state.elbo_trace);
    } else if (spec.model == ModelKind::linear) {
        LinearFit fit = fit_linear(data, groups, hyper, config);
        out.summary = std::move(fit.summary);
        out.elbo_trace = std::move(fit.state.elbo_trace);
    } else {
        LogisticFit fit = fit_logistic(data, groups, hyper, config);
        out.summary = std::move(fit.summary);
        out.elbo_trace = std::move(fit.state.elbo_trace);
    }
    return out;
}

Vector predict(const FitSummary& summary, const Matrix& X_new) {
    return summary.model == ModelKind::linear ? predict_linear(summary, X_new) : predict_logistic(summary, X_new);
}

}  // namespace graper
