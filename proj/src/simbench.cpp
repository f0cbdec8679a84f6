#include "graper/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "graper/csv.hpp"
#include "graper/errors.hpp"
#include "graper/rng.hpp"
#include "graper/special.hpp"

namespace graper {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Stream : std::uint64_t { truth_stream = 1, train_x, train_noise, test_x, test_noise, fold_stream };

template <class F>
void parallel_for(std::size_t count, int threads, F&& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                body(i);
            }
        });
    }
    for (auto& thread : pool) {
        thread.join();
    }
}

Matrix draw_design(Index rows, Index p, const Matrix& chol, bool identity, Rng& rng) {
    Matrix Z(rows, p);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < p; ++j) {
            Z(i, j) = rng.normal();
        }
    }
    if (identity) {
        return Z;
    }
    return Z * chol.transpose();
}

Vector draw_noise(Index rows, double sd, Rng& rng) {
    Vector e(rows);
    for (Index i = 0; i < rows; ++i) {
        e[i] = sd * rng.normal();
    }
    return e;
}

std::vector<std::string> default_names(Index p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Index j = 1; j <= p; ++j) {
        names.push_back("f" + std::to_string(j));
    }
    return names;
}

Vector average_ranks(const Vector& x) {
    const Index m = x.size();
    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x[a] < x[b]; });
    Vector ranks(m);
    for (Index start = 0; start < m;) {
        Index end = start;
        while (end + 1 < m && x[order[end + 1]] == x[order[start]]) {
            ++end;
        }
        const double rank = 0.5 * static_cast<double>(start + end) + 1.0;
        for (Index t = start; t <= end; ++t) {
            ranks[order[t]] = rank;
        }
        start = end + 1;
    }
    return ranks;
}

double pearson(const Vector& a, const Vector& b) {
    const Vector ca = a.array() - a.mean();
    const Vector cb = b.array() - b.mean();
    const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
    return denom > 0.0 ? ca.dot(cb) / denom : kNaN;
}

std::string join(const Vector& v) {
    std::string out;
    for (Index i = 0; i < v.size(); ++i) {
        if (i > 0) {
            out += ';';
        }
        out += csv::format_double(v[i]);
    }
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

FitConfig variant_config(FitConfig config, const Variant& variant) {
    config.dense_only = variant.dense;
    return config;
}

}  // namespace

void SimulationConfig::validate() const {
    if (n < 1 || p < 1 || G < 1 || n_test < 1) {
        throw InputError("n, p, G and n_test must be positive");
    }
    if (p % G != 0) {
        throw InputError("p = " + std::to_string(p) + " is not divisible by G = " + std::to_string(G));
    }
    if (!(rho >= 0.0 && rho < 1.0)) {
        throw InputError("rho must lie in [0, 1)");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw InputError("tau must be positive");
    }
    if (!(nu > 0.0 && nu <= 1.0)) {
        throw InputError("nu must lie in (0, 1]");
    }
    if (!gamma_levels.empty()) {
        if (gamma_levels.size() != static_cast<std::size_t>(G)) {
            throw InputError("gamma_levels needs one value per group");
        }
        for (double g : gamma_levels) {
            if (!(g > 0.0) || !std::isfinite(g)) {
                throw InputError("gamma_levels must be positive");
            }
        }
    }
}

std::vector<double> SimulationConfig::resolved_gamma() const {
    if (!gamma_levels.empty()) {
        return gamma_levels;
    }
    static const double tiers[] = {0.01, 1.0, 100.0};
    std::vector<double> gamma(static_cast<std::size_t>(G));
    for (int k = 0; k < G; ++k) {
        gamma[static_cast<std::size_t>(k)] = tiers[(k / 2) % 3];
    }
    return gamma;
}

std::vector<double> SimulationConfig::resolved_pi() const {
    std::vector<double> pi(static_cast<std::size_t>(G));
    for (int k = 0; k < G; ++k) {
        pi[static_cast<std::size_t>(k)] = k % 2 == 0 ? nu : std::min(1.0, 1.5 * nu);
    }
    return pi;
}

Matrix toeplitz_cholesky(Index p, double rho) {
    Matrix sigma(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
            sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
        }
    }
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("Toeplitz covariance is not positive definite");
    }
    return llt.matrixL();
}

SimulatedData simulate_dataset(const SimulationConfig& cfg) {
    cfg.validate();
    SimulatedData out;
    out.groups = GroupPartition::contiguous(cfg.p, cfg.G);

    const auto gamma = cfg.resolved_gamma();
    const auto pi = cfg.resolved_pi();
    GroundTruth& truth = out.truth;
    truth.gamma_true = Eigen::Map<const Vector>(gamma.data(), cfg.G);
    truth.pi_true = Eigen::Map<const Vector>(pi.data(), cfg.G);
    truth.beta_true.resize(cfg.p);
    truth.s_true.resize(cfg.p);
    Rng coef_rng(cfg.seed, truth_stream);
    for (Index j = 0; j < cfg.p; ++j) {
        const int k = out.groups.group_of(j);
        const double b = coef_rng.normal() / std::sqrt(truth.gamma_true[k]);
        const bool s = coef_rng.bernoulli(truth.pi_true[k]);
        truth.s_true[j] = s ? 1.0 : 0.0;
        truth.beta_true[j] = s ? b : 0.0;
    }

    const bool identity = cfg.rho == 0.0;
    const Matrix chol = identity ? Matrix() : toeplitz_cholesky(cfg.p, cfg.rho);
    const double noise_sd = 1.0 / std::sqrt(cfg.tau);
    auto draw = [&](Index rows, Stream xs, Stream es) {
        Dataset d;
        Rng x_rng(cfg.seed, xs);
        Rng e_rng(cfg.seed, es);
        d.X = draw_design(rows, cfg.p, chol, identity, x_rng);
        d.y = d.X * truth.beta_true + draw_noise(rows, noise_sd, e_rng);
        d.feature_names = default_names(cfg.p);
        return d;
    };
    out.train = draw(cfg.n, train_x, train_noise);
    out.test = draw(cfg.n_test, test_x, test_noise);
    return out;
}

SimulatedData simulate_amplitude_example(std::uint64_t seed, Index n_train, Index n_test, Index p) {
    if (n_train < 2 || n_test < 1 || p < 2 || p % 2 != 0) {
        throw InputError("amplitude example needs n_train >= 2, n_test >= 1 and an even p");
    }
    SimulatedData out;
    const Index half = p / 2;
    out.groups = GroupPartition::single_group(p);
    out.truth.beta_true = Vector::Zero(p);
    out.truth.beta_true.head(half).setOnes();
    out.truth.s_true = out.truth.beta_true;
    out.truth.gamma_true = Vector::Constant(1, 1.0);
    out.truth.pi_true = Vector::Constant(1, 0.5);

    Vector scale = Vector::Ones(p);
    scale.head(half).setConstant(10.0);
    auto draw = [&](Index rows, Stream xs, Stream es) {
        Dataset d;
        Rng x_rng(seed, xs);
        Rng e_rng(seed, es);
        d.X = draw_design(rows, p, Matrix(), true, x_rng) * scale.asDiagonal();
        d.y = d.X * out.truth.beta_true + draw_noise(rows, 1.0, e_rng);
        d.feature_names = default_names(p);
        return d;
    };
    out.train = draw(n_train, train_x, train_noise);
    out.test = draw(n_test, test_x, test_noise);
    return out;
}

double rmse(const Vector& a, const Vector& b) {
    if (a.size() != b.size() || a.size() == 0) {
        throw InputError("rmse needs two vectors of equal, nonzero length");
    }
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

double spearman(const Vector& a, const Vector& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw InputError("spearman needs two vectors of equal length >= 2");
    }
    return pearson(average_ranks(a), average_ranks(b));
}

double tier_rank_correlation(const Vector& estimate, const Vector& truth) {
    if (estimate.size() != truth.size() || estimate.size() < 2) {
        throw InputError("rank correlation needs two vectors of equal length >= 2");
    }
    Vector est_ranks = average_ranks(estimate);
    const Vector true_ranks = average_ranks(truth);
    Vector blocked = est_ranks;
    for (Index i = 0; i < truth.size(); ++i) {
        double sum = 0.0;
        int count = 0;
        for (Index j = 0; j < truth.size(); ++j) {
            if (true_ranks[j] == true_ranks[i]) {
                sum += est_ranks[j];
                ++count;
            }
        }
        blocked[i] = sum / count;
    }
    return pearson(blocked, true_ranks);
}

double selection_f1(const std::vector<bool>& selected, const std::vector<bool>& active) {
    if (selected.size() != active.size()) {
        throw InputError("selection vectors differ in length");
    }
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t j = 0; j < selected.size(); ++j) {
        tp += selected[j] && active[j];
        fp += selected[j] && !active[j];
        fn += !selected[j] && active[j];
    }
    if (tp + fp + fn == 0.0) {
        return 1.0;
    }
    return 2.0 * tp / (2.0 * tp + fp + fn);
}

Metrics evaluate(const FitSummary& fit, const GroundTruth& truth, const Dataset& test) {
    if (fit.beta_hat.size() != truth.beta_true.size() || test.p() != truth.beta_true.size()) {
        throw InputError("fit, truth and test data disagree on the number of features");
    }
    Metrics m;
    m.rmse_y = rmse(predict(fit, test.X), test.y);
    m.rmse_beta = rmse(fit.original_coefficients(), truth.beta_true);
    if (fit.gamma_hat.size() == truth.gamma_true.size() && truth.gamma_true.size() >= 2) {
        m.gamma_rank_corr =
            tier_rank_correlation(fit.gamma_hat.array().log().matrix(), truth.gamma_true.array().log().matrix());
        m.pi_abs_err = (fit.pi_hat - truth.pi_true).cwiseAbs().mean();
    } else {
        m.gamma_rank_corr = kNaN;
        m.pi_abs_err = kNaN;
    }
    std::vector<bool> selected(static_cast<std::size_t>(fit.inclusion_prob.size()));
    std::vector<bool> active(selected.size());
    for (std::size_t j = 0; j < selected.size(); ++j) {
        selected[j] = fit.inclusion_prob[static_cast<Index>(j)] > 0.5;
        active[j] = truth.s_true[static_cast<Index>(j)] != 0.0;
    }
    m.f1 = selection_f1(selected, active);
    return m;
}

std::vector<Variant> default_variants() {
    const ModelSpec full{ModelKind::linear, Factorization::full};
    const ModelSpec multi{ModelKind::linear, Factorization::multivariate};
    return {
        {"sparse", full, false, false},         {"dense", full, true, false},
        {"multivariate", multi, true, false},   {"sparse_single", full, false, true},
        {"dense_single", full, true, true},     {"multivariate_single", multi, true, true},
    };
}

Variant find_variant(const std::string& name) {
    for (const auto& v : default_variants()) {
        if (v.name == name) {
            return v;
        }
    }
    throw InputError("unknown variant '" + name + "'");
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    if (name == "p") return SweepParameter::p;
    if (name == "n") return SweepParameter::n;
    if (name == "rho") return SweepParameter::rho;
    if (name == "tau") return SweepParameter::tau;
    if (name == "nu") return SweepParameter::nu;
    throw InputError("unknown sweep parameter '" + name + "' (expected p, n, rho, tau or nu)");
}

std::string to_string(SweepParameter parameter) {
    switch (parameter) {
        case SweepParameter::p: return "p";
        case SweepParameter::n: return "n";
        case SweepParameter::rho: return "rho";
        case SweepParameter::tau: return "tau";
        case SweepParameter::nu: return "nu";
    }
    return "?";
}

std::vector<double> default_sweep_values(SweepParameter parameter) {
    std::vector<double> values;
    switch (parameter) {
        case SweepParameter::p:
            for (int p = 60; p <= 1200; p += 60) values.push_back(p);
            break;
        case SweepParameter::n:
            for (int n = 20; n <= 500; n += 20) values.push_back(n);
            break;
        case SweepParameter::rho:
            for (int r = 0; r <= 9; ++r) values.push_back(r / 10.0);
            break;
        case SweepParameter::tau:
            values = {0.01, 0.1, 1.0, 10.0, 100.0};
            break;
        case SweepParameter::nu:
            values = {0.001, 0.01, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
            break;
    }
    return values;
}

void apply_sweep_value(SimulationConfig& cfg, SweepParameter parameter, double value) {
    switch (parameter) {
        case SweepParameter::p: cfg.p = static_cast<Index>(std::llround(value)); break;
        case SweepParameter::n: cfg.n = static_cast<Index>(std::llround(value)); break;
        case SweepParameter::rho: cfg.rho = value; break;
        case SweepParameter::tau: cfg.tau = value; break;
        case SweepParameter::nu: cfg.nu = value; break;
    }
}

std::vector<GridRow> run_grid(const SimulationConfig& base, const GridOptions& options) {
    if (options.replicates < 1) {
        throw InputError("replicates must be at least 1");
    }
    options.config.validate();
    options.hyper.validate();
    const auto values = options.values.empty() ? default_sweep_values(options.parameter) : options.values;
    const auto variants = options.variants.empty() ? default_variants() : options.variants;
    for (double value : values) {
        SimulationConfig cfg = base;
        apply_sweep_value(cfg, options.parameter, value);
        cfg.validate();
    }

    const std::size_t cells = values.size() * static_cast<std::size_t>(options.replicates);
    std::vector<GridRow> rows(cells * variants.size());
    parallel_for(cells, options.threads, [&](std::size_t cell) {
        const double value = values[cell / static_cast<std::size_t>(options.replicates)];
        const int replicate = static_cast<int>(cell % static_cast<std::size_t>(options.replicates));
        SimulationConfig cfg = base;
        apply_sweep_value(cfg, options.parameter, value);
        cfg.seed = base.seed + static_cast<std::uint64_t>(replicate);

        std::string sim_error;
        SimulatedData sim;
        try {
            sim = simulate_dataset(cfg);
        } catch (const std::exception& err) {
            sim_error = err.what();
        }
        for (std::size_t v = 0; v < variants.size(); ++v) {
            GridRow& row = rows[cell * variants.size() + v];
            row.parameter = to_string(options.parameter);
            row.value = value;
            row.replicate = replicate;
            row.seed = cfg.seed;
            row.variant = variants[v].name;
            if (!sim_error.empty()) {
                row.error = sim_error;
                continue;
            }
            const GroupPartition groups =
                variants[v].single_group ? GroupPartition::single_group(cfg.p) : sim.groups;
            const auto start = std::chrono::steady_clock::now();
            try {
                FitResult fit = fit_model(sim.train, groups, options.hyper, variant_config(options.config, variants[v]),
                                          variants[v].spec);
                row.seconds = seconds_since(start);
                row.metrics = evaluate(fit.summary, sim.truth, sim.test);
                row.gamma_hat = fit.summary.gamma_hat;
                row.pi_hat = fit.summary.pi_hat;
                row.iterations = fit.summary.n_iterations;
                row.converged = fit.summary.converged;
            } catch (const std::exception& err) {
                row.seconds = seconds_since(start);
                row.error = err.what();
            }
        }
    });
    return rows;
}

void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows) {
    csv::write_row(out, {"parameter", "value", "replicate", "seed", "variant", "rmse_y", "rmse_beta",
                         "gamma_rank_corr", "pi_abs_err", "f1", "gamma_hat", "pi_hat", "seconds", "iterations",
                         "converged", "error"});
    for (const auto& r : rows) {
        csv::write_row(out, {r.parameter, csv::format_double(r.value), std::to_string(r.replicate),
                             std::to_string(r.seed), r.variant, csv::format_double(r.metrics.rmse_y),
                             csv::format_double(r.metrics.rmse_beta), csv::format_double(r.metrics.gamma_rank_corr),
                             csv::format_double(r.metrics.pi_abs_err), csv::format_double(r.metrics.f1),
                             join(r.gamma_hat), join(r.pi_hat), csv::format_double(r.seconds),
                             std::to_string(r.iterations), r.converged ? "true" : "false", r.error});
    }
}

std::vector<std::vector<Index>> make_folds(Index n, int k_folds, std::uint64_t seed) {
    if (k_folds < 2 || n < k_folds) {
        throw InputError("cross-validation needs n >= k_folds >= 2");
    }
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng(seed, fold_stream);
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
        std::swap(perm[i], perm[static_cast<std::size_t>(rng.below(i + 1))]);
    }
    std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k_folds));
    for (std::size_t i = 0; i < perm.size(); ++i) {
        folds[i % folds.size()].push_back(perm[i]);
    }
    for (auto& fold : folds) {
        std::sort(fold.begin(), fold.end());
    }
    return folds;
}

std::vector<FoldResult> cross_validate(const Dataset& data, const GroupPartition& groups, const HyperPriors& hyper,
                                       const FitConfig& config, const CvOptions& options) {
    config.validate();
    hyper.validate();
    data.validate(response_kind(options.spec.model));
    const auto folds = make_folds(data.n(), options.k_folds, config.seed);
    for (const auto& fold : folds) {
        if (fold.empty()) {
            throw InputError("cross-validation fold has no test rows");
        }
    }

    std::vector<FoldResult> results(folds.size());
    parallel_for(folds.size(), options.threads, [&](std::size_t f) {
        std::vector<char> in_test(static_cast<std::size_t>(data.n()), 0);
        for (Index i : folds[f]) {
            in_test[static_cast<std::size_t>(i)] = 1;
        }
        std::vector<Index> train_rows;
        for (Index i = 0; i < data.n(); ++i) {
            if (!in_test[static_cast<std::size_t>(i)]) {
                train_rows.push_back(i);
            }
        }
        const Dataset train = data.subset_rows(train_rows);
        const Dataset test = data.subset_rows(folds[f]);
        const FitResult fit = fit_model(train, groups, hyper, config, options.spec);

        FoldResult& r = results[f];
        r.fold = static_cast<int>(f) + 1;
        r.n_train = train.n();
        r.n_test = test.n();
        r.gamma_hat = fit.summary.gamma_hat;
        r.pi_hat = fit.summary.pi_hat;
        r.iterations = fit.summary.n_iterations;
        r.converged = fit.summary.converged;
        const Vector pred = predict(fit.summary, test.X);
        if (options.spec.model == ModelKind::linear) {
            r.rmse = rmse(pred, test.y);
            r.classification_error = kNaN;
            r.log_loss = kNaN;
        } else {
            r.rmse = kNaN;
            double errors = 0.0;
            double loss = 0.0;
            for (Index i = 0; i < test.n(); ++i) {
                const double prob = std::clamp(pred[i], 1e-15, 1.0 - 1e-15);
                errors += (prob > 0.5 ? 1.0 : 0.0) != test.y[i];
                loss -= test.y[i] == 1.0 ? std::log(prob) : std::log1p(-prob);
            }
            r.classification_error = errors / static_cast<double>(test.n());
            r.log_loss = loss / static_cast<double>(test.n());
        }
    });
    return results;
}

void write_cv_csv(std::ostream& out, const std::vector<FoldResult>& folds) {
    csv::write_row(out, {"fold", "n_train", "n_test", "rmse", "classification_error", "log_loss", "gamma_hat",
                         "pi_hat", "iterations", "converged"});
    for (const auto& r : folds) {
        csv::write_row(out, {std::to_string(r.fold), std::to_string(r.n_train), std::to_string(r.n_test),
                             csv::format_double(r.rmse), csv::format_double(r.classification_error),
                             csv::format_double(r.log_loss), join(r.gamma_hat), join(r.pi_hat),
                             std::to_string(r.iterations), r.converged ? "true" : "false"});
    }
}

std::vector<TimingRow> benchmark_runtime(const SimulationConfig& base, const BenchmarkOptions& options) {
    if (options.replicates < 1) {
        throw InputError("replicates must be at least 1");
    }
    if (options.sweeps < 0) {
        throw InputError("sweeps must be non-negative");
    }
    FitConfig config = options.config;
    if (options.sweeps > 0) {
        config.min_iter = options.sweeps;
        config.max_iter = options.sweeps;
    }
    config.validate();
    options.hyper.validate();
    std::vector<Variant> variants = options.variants;
    if (variants.empty()) {
        variants = {find_variant("sparse"), find_variant("dense"), find_variant("multivariate")};
    }

    struct Setting {
        std::string axis;
        double value;
        SimulationConfig cfg;
    };
    std::vector<Setting> settings;
    for (Index n : options.n_values) {
        SimulationConfig cfg = base;
        cfg.n = n;
        settings.push_back({"n", static_cast<double>(n), cfg});
    }
    for (Index p : options.p_values) {
        SimulationConfig cfg = base;
        cfg.p = p;
        settings.push_back({"p", static_cast<double>(p), cfg});
    }
    for (int G : options.G_values) {
        SimulationConfig cfg = base;
        cfg.G = G;
        settings.push_back({"G", static_cast<double>(G), cfg});
    }
    for (auto& s : settings) {
        s.cfg.gamma_levels.clear();
        s.cfg.validate();
    }

    std::vector<TimingRow> rows;
    for (const auto& s : settings) {
        std::vector<std::vector<double>> times(variants.size());
        std::vector<double> iterations(variants.size(), 0.0);
        std::vector<int> failures(variants.size(), 0);
        for (int r = 0; r < options.replicates; ++r) {
            SimulationConfig cfg = s.cfg;
            cfg.seed = base.seed + static_cast<std::uint64_t>(r);
            cfg.n_test = 1;
            const SimulatedData sim = simulate_dataset(cfg);
            for (std::size_t v = 0; v < variants.size(); ++v) {
                const GroupPartition groups =
                    variants[v].single_group ? GroupPartition::single_group(cfg.p) : sim.groups;
                const auto start = std::chrono::steady_clock::now();
                try {
                    const FitResult fit =
                        fit_model(sim.train, groups, options.hyper, variant_config(config, variants[v]), variants[v].spec);
                    times[v].push_back(seconds_since(start));
                    iterations[v] += fit.summary.n_iterations;
                } catch (const std::exception&) {
                    ++failures[v];
                }
            }
        }
        for (std::size_t v = 0; v < variants.size(); ++v) {
            TimingRow row;
            row.axis = s.axis;
            row.value = s.value;
            row.variant = variants[v].name;
            row.replicates = static_cast<int>(times[v].size());
            row.failures = failures[v];
            if (!times[v].empty()) {
                const double count = static_cast<double>(times[v].size());
                row.mean_seconds = std::accumulate(times[v].begin(), times[v].end(), 0.0) / count;
                double ss = 0.0;
                for (double t : times[v]) {
                    ss += (t - row.mean_seconds) * (t - row.mean_seconds);
                }
                row.sd_seconds = times[v].size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
                row.mean_iterations = iterations[v] / count;
            } else {
                row.mean_seconds = row.sd_seconds = row.mean_iterations = kNaN;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
    csv::write_row(out, {"axis", "value", "variant", "mean_seconds", "sd_seconds", "mean_iterations", "replicates",
                         "failures"});
    for (const auto& r : rows) {
        csv::write_row(out, {r.axis, csv::format_double(r.value), r.variant, csv::format_double(r.mean_seconds),
                             csv::format_double(r.sd_seconds), csv::format_double(r.mean_iterations),
                             std::to_string(r.replicates), std::to_string(r.failures)});
    }
}

}  // namespace graper
