#include "graper/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "graper/errors.hpp"

namespace graper {

double digamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("digamma: argument must be positive and finite");
    }
    // Accumulate the shift terms smallest-first so the dominant 1/x at tiny
    // arguments is subtracted last.
    double shift[10];
    int n_shift = 0;
    while (x < 10.0) {
        shift[n_shift++] = 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli-number coefficients B_2k / (2k).
    const double series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    double result = std::log(x) - 0.5 * inv - series;
    for (int k = n_shift - 1; k >= 0; --k) {
        result -= shift[k];
    }
    return result;
}

double log_gamma(double x) { return std::lgamma(x); }

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double log_sigmoid(double z) {
    if (z >= 0.0) {
        return -std::log1p(std::exp(-z));
    }
    return z - std::log1p(std::exp(z));
}

double gamma_entropy(double shape, double rate) {
    return shape - std::log(rate) + std::lgamma(shape) + (1.0 - shape) * digamma(shape);
}

double beta_entropy(double a, double b) {
    return log_beta(a, b) - (a - 1.0) * digamma(a) - (b - 1.0) * digamma(b) + (a + b - 2.0) * digamma(a + b);
}

double bernoulli_entropy(double p) {
    constexpr double eps = 1e-12;
    p = std::clamp(p, eps, 1.0 - eps);
    return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

double normal_entropy(double variance) {
    return 0.5 * (std::log(2.0 * std::numbers::pi * variance) + 1.0);
}

}  // namespace graper
