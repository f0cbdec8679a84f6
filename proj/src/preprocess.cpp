#include "graper/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "graper/errors.hpp"
#include "graper/log.hpp"

namespace graper {

Matrix PreprocessTransform::apply(const Matrix& X) const {
    if (X.cols() != feature_means.size()) {
        throw InputError("transform expects " + std::to_string(feature_means.size()) + " columns");
    }
    Matrix Z = X.rowwise() - feature_means.transpose();
    Z.array().rowwise() /= feature_sds.transpose().array();
    return Z;
}

Matrix PreprocessTransform::invert(const Matrix& Z) const {
    if (Z.cols() != feature_means.size()) {
        throw InputError("transform expects " + std::to_string(feature_means.size()) + " columns");
    }
    Matrix X = Z.array().rowwise() * feature_sds.transpose().array();
    X.rowwise() += feature_means.transpose();
    return X;
}

PreparedData preprocess(const Dataset& data, const PreprocessOptions& options, ResponseKind kind) {
    const Index n = data.n();
    const Index p = data.p();

    PreparedData out;
    PreprocessTransform& t = out.transform;
    t.centered = options.center;
    t.standardized = options.standardize;
    t.feature_means = Vector::Zero(p);
    t.feature_sds = Vector::Ones(p);

    if (options.standardize && n < 2) {
        throw InputError("standardization needs at least two samples");
    }
    const Vector column_means = data.X.colwise().mean().transpose();
    if (options.center) {
        t.feature_means = column_means;
    }
    if (options.standardize) {
        for (Index j = 0; j < p; ++j) {
            const double ss = (data.X.col(j).array() - column_means[j]).square().sum();
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            if (!(sd > 0.0)) {
                const std::string name =
                    data.feature_names.empty() ? "#" + std::to_string(j + 1) : data.feature_names[static_cast<std::size_t>(j)];
                throw InputError("zero-variance column " + name + " cannot be standardized");
            }
            t.feature_sds[j] = sd;
        }
    }

    out.data = data;
    out.data.X = t.apply(data.X);
    if (options.center && kind == ResponseKind::continuous) {
        t.response_mean = data.y.mean();
        out.data.y.array() -= t.response_mean;
    }
    return out;
}

PreparedData standardize(const Dataset& data, bool enable, ResponseKind kind) {
    return preprocess(data, PreprocessOptions{enable, enable}, kind);
}

GroupPartition groups_from_covariate(const std::vector<std::string>& labels) {
    if (labels.empty()) {
        throw InputError("covariate must have one entry per feature");
    }
    std::map<std::string, int> index;
    std::vector<std::string> names;
    std::vector<int> assignment;
    assignment.reserve(labels.size());
    for (const auto& label : labels) {
        auto [it, inserted] = index.try_emplace(label, static_cast<int>(names.size()));
        if (inserted) {
            names.push_back(label);
        }
        assignment.push_back(it->second);
    }
    return GroupPartition(std::move(assignment), std::move(names));
}

GroupPartition groups_from_covariate(const std::vector<double>& values, int n_bins) {
    const auto p = static_cast<Index>(values.size());
    if (p == 0) {
        throw InputError("covariate must have one entry per feature");
    }
    if (n_bins < 1 || n_bins > p) {
        throw InputError("n_bins must be between 1 and the number of features");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InputError("covariate contains non-finite values");
        }
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    // Upper edge of bin k is the value at sorted rank ceil(k p / n_bins) - 1.
    std::vector<double> edges;
    for (int k = 1; k < n_bins; ++k) {
        const Index rank = (static_cast<Index>(k) * p + n_bins - 1) / n_bins - 1;
        edges.push_back(sorted[static_cast<std::size_t>(rank)]);
    }
    std::vector<int> raw(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
        raw[j] = static_cast<int>(std::lower_bound(edges.begin(), edges.end(), values[j]) - edges.begin());
    }

    // Renumber occupied bins consecutively.
    std::vector<int> occupied(static_cast<std::size_t>(n_bins), 0);
    for (int b : raw) {
        occupied[static_cast<std::size_t>(b)] = 1;
    }
    std::vector<int> remap(static_cast<std::size_t>(n_bins), -1);
    int next = 0;
    for (int b = 0; b < n_bins; ++b) {
        if (occupied[static_cast<std::size_t>(b)]) {
            remap[static_cast<std::size_t>(b)] = next++;
        }
    }
    if (next < n_bins) {
        warn("covariate ties left " + std::to_string(n_bins - next) + " quantile bin(s) empty; merged into " +
             std::to_string(next) + " group(s)");
    }
    std::vector<int> assignment(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
        assignment[j] = remap[static_cast<std::size_t>(raw[j])];
    }
    return GroupPartition(std::move(assignment));
}

}  // namespace graper
