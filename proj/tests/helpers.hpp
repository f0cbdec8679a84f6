#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "graper/model.hpp"
#include "graper/rng.hpp"

namespace test {

using graper::Index;
using graper::Matrix;
using graper::Vector;

// 50-digit digamma used as the reference for the double-precision one.
inline double reference_digamma(double x) {
    using big = boost::multiprecision::cpp_bin_float_50;
    return static_cast<double>(boost::math::digamma(big(x)));
}

inline Matrix random_matrix(Index rows, Index cols, graper::Rng& rng) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

inline Vector random_vector(Index size, graper::Rng& rng) {
    Vector v(size);
    for (Index i = 0; i < size; ++i) v[i] = rng.normal();
    return v;
}

inline double uniform(graper::Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline Index uniform_int(graper::Rng& rng, Index lo, Index hi) {
    return lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

// Linear-model data with a sparse truth and features split into G groups.
inline graper::Dataset linear_data(Index n, Index p, graper::Rng& rng, double noise_sd = 1.0) {
    graper::Dataset d;
    d.X = random_matrix(n, p, rng);
    Vector beta = Vector::Zero(p);
    for (Index j = 0; j < p; ++j)
        if (rng.uniform() < 0.3) beta[j] = 2.0 * rng.normal();
    d.y = d.X * beta + noise_sd * random_vector(n, rng);
    return d;
}

inline graper::Dataset binary_data(Index n, Index p, graper::Rng& rng) {
    graper::Dataset d;
    d.X = random_matrix(n, p, rng);
    Vector beta = Vector::Zero(p);
    for (Index j = 0; j < p; ++j)
        if (rng.uniform() < 0.3) beta[j] = rng.normal();
    const Vector z = d.X * beta;
    d.y.resize(n);
    for (Index i = 0; i < n; ++i) d.y[i] = rng.uniform() < 1.0 / (1.0 + std::exp(-z[i])) ? 1.0 : 0.0;
    d.y[0] = 0.0;
    d.y[1] = 1.0;
    return d;
}

// Random partition of p features into at most G non-empty groups.
inline graper::GroupPartition random_groups(Index p, int G, graper::Rng& rng) {
    G = static_cast<int>(std::min<Index>(G, p));
    std::vector<int> a(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) a[static_cast<std::size_t>(j)] = j < G ? static_cast<int>(j) : static_cast<int>(rng.below(G));
    return graper::GroupPartition(a);
}

inline std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("graper_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline double max_rel_diff(const Vector& a, const Vector& b) {
    double worst = 0.0;
    for (Index i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    return worst;
}

}  // namespace test
