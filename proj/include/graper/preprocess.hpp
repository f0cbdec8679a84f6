#pragma once

#include <string>
#include <vector>

#include "graper/model.hpp"

namespace graper {

struct PreprocessOptions {
    bool standardize = true;  // scale columns to unit sample sd (n - 1 divisor)
    bool center = true;       // center columns, and a continuous response
};

struct PreparedData {
    Dataset data;
    PreprocessTransform transform;
};

// Centers and scales every column and centers a continuous response; with
// `enable` off the transform is the identity. Throws InputError naming the
// first zero-variance column.
PreparedData standardize(const Dataset& data, bool enable, ResponseKind kind = ResponseKind::continuous);

// General form used by the fitting routines: centering (the intercept) and
// scaling are controlled independently.
PreparedData preprocess(const Dataset& data, const PreprocessOptions& options, ResponseKind kind);

// Categorical covariate: one group per distinct label, numbered by first appearance.
GroupPartition groups_from_covariate(const std::vector<std::string>& labels);

// Continuous covariate: equal-frequency bins. Bins emptied by ties are merged
// into their neighbours (with a warning). Throws if n_bins > p or n_bins < 1.
GroupPartition groups_from_covariate(const std::vector<double>& values, int n_bins);

}  // namespace graper
