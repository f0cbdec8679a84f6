#include <doctest.h>

#include <cmath>
#include <numbers>

#include "graper/errors.hpp"
#include "graper/linear.hpp"
#include "graper/logistic.hpp"
#include "graper/multivariate.hpp"
#include "graper/simbench.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace graper;

namespace {

bool trace_monotone(const std::vector<double>& trace, double slack = 1e-8) {
    for (std::size_t t = 1; t < trace.size(); ++t) {
        if (trace[t] < trace[t - 1] - slack * std::abs(trace[t - 1])) return false;
    }
    return true;
}

// log|A| by LU, independent of the Cholesky-based value under test.
double log_det(const Matrix& A) { return std::log(A.fullPivLu().determinant()); }

double multivariate_elbo_ref(const MultivariateState& s, const Dataset& d, const GroupPartition& g,
                             const HyperPriors& h) {
    const double n = static_cast<double>(d.n());
    const Index p = d.p();
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    const auto tau = test::gamma_moments(s.alpha_tau, s.beta_tau);
    const double rss = (d.y - d.X * s.mu).squaredNorm() + (d.X.transpose() * d.X * s.Sigma).trace();
    double total = 0.5 * n * tau.log_mean - 0.5 * tau.mean * rss - 0.5 * n * log_2pi;
    total += (h.r_tau - 1.0) * tau.log_mean - h.d_tau * tau.mean - std::lgamma(h.r_tau) + h.r_tau * std::log(h.d_tau);
    total += tau.entropy;
    for (Index j = 0; j < p; ++j) {
        const auto gm = test::gamma_moments(s.alpha_gamma[g.group_of(j)], s.beta_gamma[g.group_of(j)]);
        total += 0.5 * gm.log_mean - 0.5 * gm.mean * (s.mu[j] * s.mu[j] + s.Sigma(j, j)) - 0.5 * log_2pi;
    }
    for (int k = 0; k < g.num_groups(); ++k) {
        const auto gm = test::gamma_moments(s.alpha_gamma[k], s.beta_gamma[k]);
        total += (h.r_gamma - 1.0) * gm.log_mean - h.d_gamma * gm.mean - std::lgamma(h.r_gamma) +
                 h.r_gamma * std::log(h.d_gamma) + gm.entropy;
    }
    total += 0.5 * static_cast<double>(p) * (log_2pi + 1.0) + 0.5 * log_det(s.Sigma);
    return total;
}

}  // namespace

TEST_CASE("gaussian_posterior: identity case") {
    const GaussianPosterior post = gaussian_posterior(Matrix::Zero(3, 2), Vector::Zero(3), Vector::Ones(3),
                                                      Vector::Ones(2), InversionRoute::direct);
    CHECK(post.Sigma.isApprox(Matrix::Identity(2, 2)));
    CHECK(post.mu.norm() == 0.0);
    CHECK(post.log_det_sigma == doctest::Approx(0.0));
}

TEST_CASE("gaussian_posterior: hand-checkable 1 x 2 case on both routes") {
    const Matrix X = (Matrix(1, 2) << 1.0, 0.0).finished();
    for (auto route : {InversionRoute::automatic, InversionRoute::direct, InversionRoute::woodbury}) {
        const GaussianPosterior post =
            gaussian_posterior(X, Vector::Constant(1, 2.0), Vector::Ones(1), Vector::Ones(2), route);
        CHECK(post.Sigma(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(post.Sigma(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(post.Sigma(0, 1)) < 1e-15);
        CHECK(post.mu[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(post.mu[1]) < 1e-15);
        CHECK(post.log_det_sigma == doctest::Approx(std::log(0.5)).epsilon(1e-14));
    }
    CHECK(gaussian_posterior(X, Vector::Ones(1), Vector::Ones(1), Vector::Ones(2)).route == InversionRoute::woodbury);
}

TEST_CASE("gaussian_posterior: Woodbury and direct agree with an explicit inverse") {
    Rng rng(40);
    for (int t = 0; t < 100; ++t) {
        const Index n = test::uniform_int(rng, 1, 30), p = test::uniform_int(rng, 1, 30);
        const Matrix X = test::random_matrix(n, p, rng);
        Vector w(n), d(p);
        for (Index i = 0; i < n; ++i) w[i] = test::uniform(rng, 0.05, 4.0);
        for (Index j = 0; j < p; ++j) d[j] = test::uniform(rng, 0.05, 10.0);
        const Vector wr = w.cwiseProduct(test::random_vector(n, rng));
        const GaussianPosterior a = gaussian_posterior(X, wr, w, d, InversionRoute::direct);
        const GaussianPosterior b = gaussian_posterior(X, wr, w, d, InversionRoute::woodbury);
        Matrix precision = X.transpose() * w.asDiagonal() * X;
        precision.diagonal() += d;
        const Matrix oracle = precision.inverse();
        CHECK((a.Sigma - b.Sigma).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((a.Sigma - oracle).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((a.mu - oracle * X.transpose() * wr).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((a.mu - b.mu).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(a.log_det_sigma == doctest::Approx(-log_det(precision)).epsilon(1e-9));
        CHECK(b.log_det_sigma == doctest::Approx(-log_det(precision)).epsilon(1e-9));
        CHECK((a.Sigma - a.Sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((b.Sigma.diagonal().array() > 0.0).all());
    }
}

TEST_CASE("gaussian_posterior: route selection and guards") {
    Rng rng(1);
    const Matrix X = test::random_matrix(3, 5, rng);
    Vector d = Vector::Ones(5);
    d[2] = 0.0;
    CHECK(gaussian_posterior(X, Vector::Ones(3), Vector::Ones(3), d).route == InversionRoute::direct);
    CHECK_THROWS_AS(gaussian_posterior(X, Vector::Ones(3), Vector::Ones(3), d, InversionRoute::woodbury), InputError);
    const Matrix square = test::random_matrix(5, 5, rng);
    CHECK(gaussian_posterior(square, Vector::Ones(5), Vector::Ones(5), Vector::Ones(5)).route == InversionRoute::direct);
    CHECK_THROWS_AS(gaussian_posterior(X, Vector::Ones(2), Vector::Ones(3), Vector::Ones(5)), InputError);
}

TEST_CASE("multivariate beta update at unit expectations is the ridge solution") {
    Rng rng(12);
    for (auto [n, p] : {std::pair<Index, Index>{20, 6}, std::pair<Index, Index>{6, 20}}) {
        Dataset d{test::random_matrix(n, p, rng), test::random_vector(n, rng), {}, {}};
        const GroupPartition g = GroupPartition::contiguous(p, 2);
        MultivariateState s;
        s.mu = Vector::Zero(p);
        s.Sigma = Matrix::Identity(p, p);
        s.alpha_gamma = s.beta_gamma = Vector::Ones(2);
        update_beta_multivariate(s, d, g);
        Matrix A = d.X.transpose() * d.X;
        A.diagonal().array() += 1.0;
        const Vector ridge = A.ldlt().solve(d.X.transpose() * d.y);
        CHECK((s.mu - ridge).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(s.last_route == (n < p ? InversionRoute::woodbury : InversionRoute::direct));
    }
}

TEST_CASE("multivariate ELBO equals an independent evaluation") {
    Rng rng(18);
    for (int t = 0; t < 30; ++t) {
        const Index n = test::uniform_int(rng, 2, 12), p = test::uniform_int(rng, 1, 10);
        const GroupPartition g = test::random_groups(p, 3, rng);
        Dataset d{test::random_matrix(n, p, rng), test::random_vector(n, rng), {}, {}};
        MultivariateState s;
        s.mu = test::random_vector(p, rng);
        const Matrix L = test::random_matrix(p, p, rng);
        s.Sigma = L * L.transpose() + 0.1 * Matrix::Identity(p, p);
        s.log_det_sigma = log_det(s.Sigma);
        s.alpha_gamma = s.beta_gamma = Vector::Ones(g.num_groups());
        for (int k = 0; k < g.num_groups(); ++k) {
            s.alpha_gamma[k] = test::uniform(rng, 0.5, 5);
            s.beta_gamma[k] = test::uniform(rng, 0.5, 5);
        }
        s.alpha_tau = test::uniform(rng, 0.5, 5);
        s.beta_tau = test::uniform(rng, 0.5, 5);
        const HyperPriors h;
        CHECK(compute_elbo_multivariate(s, d, g, h) ==
              doctest::Approx(multivariate_elbo_ref(s, d, g, h)).epsilon(1e-10));
    }
}

TEST_CASE("fit_linear_multivariate: sparse prior is unsupported") {
    Rng rng(2);
    const Dataset d = test::linear_data(10, 4, rng);
    CHECK_THROWS_AS(fit_linear_multivariate(d, GroupPartition::single_group(4), HyperPriors{}, FitConfig{}),
                    UnsupportedError);
    CHECK_THROWS_AS(fit_logistic_multivariate(test::binary_data(10, 4, rng), GroupPartition::single_group(4),
                                              HyperPriors{}, FitConfig{}),
                    UnsupportedError);
}

TEST_CASE("fit_linear_multivariate: monotone, SPD covariance") {
    Rng rng(50);
    FitConfig c;
    c.dense_only = true;
    for (int t = 0; t < 20; ++t) {
        const Index n = test::uniform_int(rng, 5, 60), p = test::uniform_int(rng, 2, 60);
        const Dataset d = test::linear_data(n, p, rng);
        const GroupPartition g = test::random_groups(p, 3, rng);
        c.seed = static_cast<std::uint64_t>(t);
        const MultivariateFit fit = fit_linear_multivariate(d, g, HyperPriors{}, c);
        CHECK(trace_monotone(fit.state.elbo_trace));
        CHECK(fit.state.Sigma.llt().info() == Eigen::Success);
        CHECK((fit.state.Sigma - fit.state.Sigma.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * fit.state.Sigma.cwiseAbs().maxCoeff());
        CHECK(fit.summary.factorization == Factorization::multivariate);
        CHECK((fit.summary.pi_hat.array() == 1.0).all());
    }
}

TEST_CASE("orthogonal design: multivariate and factorized dense fits coincide") {
    Rng rng(61);
    const Index n = 40, p = 8;
    const Matrix Q = Eigen::HouseholderQR<Matrix>(test::random_matrix(n, p, rng)).householderQ() * Matrix::Identity(n, p);
    Dataset d;
    d.X = std::sqrt(3.0) * Q;
    d.y = d.X * test::random_vector(p, rng) + 0.5 * test::random_vector(n, rng);
    const GroupPartition g = GroupPartition::contiguous(p, 2);
    FitConfig c;
    c.dense_only = true;
    c.standardize = false;
    c.intercept = false;
    c.elbo_rel_tol = 1e-15;
    c.max_iter = 20000;
    const MultivariateFit multi = fit_linear_multivariate(d, g, HyperPriors{}, c);
    const LinearFit fact = fit_linear(d, g, HyperPriors{}, c);
    CHECK((multi.summary.beta_hat - fact.summary.beta_hat).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(test::max_rel_diff(multi.summary.gamma_hat, fact.summary.gamma_hat) < 1e-6);
}

TEST_CASE("single feature: multivariate and factorized dense ELBOs agree") {
    Rng rng(62);
    const Dataset d = test::linear_data(15, 1, rng);
    FitConfig c;
    c.dense_only = true;
    c.min_iter = c.max_iter = 5;
    const MultivariateFit multi = fit_linear_multivariate(d, GroupPartition::single_group(1), HyperPriors{}, c);
    const LinearFit fact = fit_linear(d, GroupPartition::single_group(1), HyperPriors{}, c);
    for (std::size_t t = 1; t < 5; ++t) {
        CHECK(multi.state.elbo_trace[t] == doctest::Approx(fact.state.elbo_trace[t]).epsilon(1e-10));
    }
}

TEST_CASE("logistic multivariate: monotone bound, intercept handled") {
    Rng rng(70);
    FitConfig c;
    c.dense_only = true;
    for (int t = 0; t < 15; ++t) {
        const Index n = test::uniform_int(rng, 10, 60), p = test::uniform_int(rng, 2, 40);
        const Dataset d = test::binary_data(n, p, rng);
        c.intercept = t % 2 == 0;
        const MultivariateFit fit = fit_logistic_multivariate(d, test::random_groups(p, 3, rng), HyperPriors{}, c);
        CHECK(trace_monotone(fit.state.elbo_trace));
        CHECK(fit.state.num_features() == p);
        const Vector prob = predict_logistic(fit.summary, d.X);
        CHECK((prob.array() > 0.0).all());
        CHECK((prob.array() < 1.0).all());
    }
}

TEST_CASE("strong correlation: multivariate predicts at least as well as factorized dense") {
    double multi = 0.0, fact = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SimulationConfig cfg;
        cfg.rho = 0.9;
        cfg.seed = seed;
        const SimulatedData sim = simulate_dataset(cfg);
        FitConfig c;
        c.dense_only = true;
        multi += evaluate(fit_linear_multivariate(sim.train, sim.groups, HyperPriors{}, c).summary, sim.truth, sim.test)
                     .rmse_y;
        fact += evaluate(fit_linear(sim.train, sim.groups, HyperPriors{}, c).summary, sim.truth, sim.test).rmse_y;
    }
    MESSAGE("mean test RMSE at rho = 0.9: multivariate " << multi / 10 << ", factorized " << fact / 10);
    CHECK(multi <= fact);
}
