#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "fit_io.hpp"
#include "graper/csv.hpp"
#include "graper/errors.hpp"
#include "graper/fit.hpp"
#include "graper/simbench.hpp"

namespace graper::cli {

namespace {

namespace fs = std::filesystem;

struct FitFlags {
    std::string data;
    std::string groups;
    std::string model = "linear";
    std::string factorization = "full";
    std::string standardize = "on";
    std::string intercept = "on";
    bool dense = false;
    int max_iter = 3000;
    double tol = 1e-5;
    std::optional<std::uint64_t> seed;
    HyperPriors hyper;
};

struct SimFlags {
    SimulationConfig cfg;
    std::optional<std::uint64_t> seed;
};

const std::vector<std::string> on_off{"on", "off"};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("GRAPER_SEED"); env && *env) {
        char* end = nullptr;
        errno = 0;
        const unsigned long long value = std::strtoull(env, &end, 10);
        if (errno != 0 || *end != '\0' || env[0] == '-') {
            throw InputError(std::string("GRAPER_SEED is not a non-negative integer: ") + env);
        }
        return value;
    }
    return 0;
}

void add_hyper_flags(CLI::App* app, HyperPriors& h) {
    app->add_option("--r-tau", h.r_tau, "Gamma shape of the noise precision prior")->capture_default_str();
    app->add_option("--d-tau", h.d_tau, "Gamma rate of the noise precision prior")->capture_default_str();
    app->add_option("--r-gamma", h.r_gamma, "Gamma shape of the slab precision prior")->capture_default_str();
    app->add_option("--d-gamma", h.d_gamma, "Gamma rate of the slab precision prior")->capture_default_str();
    app->add_option("--d-pi", h.d_pi, "first Beta parameter of the inclusion prior")->capture_default_str();
    app->add_option("--r-pi", h.r_pi, "second Beta parameter of the inclusion prior")->capture_default_str();
}

void add_fit_flags(CLI::App* app, FitFlags& f) {
    app->add_option("--data", f.data, "CSV with a 'response' column followed by features")->required();
    app->add_option("--groups", f.groups, "CSV with columns feature,group (default: one group)");
    app->add_option("--model", f.model)->check(CLI::IsMember({"linear", "logistic"}))->capture_default_str();
    app->add_option("--factorization", f.factorization)
        ->check(CLI::IsMember({"full", "multivariate"}))
        ->capture_default_str();
    app->add_flag("--dense", f.dense, "drop the spike (pi = 1); required for the multivariate factorization");
    app->add_option("--standardize", f.standardize)->check(CLI::IsMember(on_off))->capture_default_str();
    app->add_option("--intercept", f.intercept)->check(CLI::IsMember(on_off))->capture_default_str();
    app->add_option("--max-iter", f.max_iter)->capture_default_str();
    app->add_option("--tol", f.tol, "relative ELBO change for convergence")->capture_default_str();
    app->add_option("--seed", f.seed, "RNG seed (default: $GRAPER_SEED, else 0)");
    add_hyper_flags(app, f.hyper);
}

void add_sim_flags(CLI::App* app, SimFlags& s) {
    app->add_option("--n", s.cfg.n)->capture_default_str();
    app->add_option("--p", s.cfg.p)->capture_default_str();
    app->add_option("--G", s.cfg.G, "number of equally sized groups")->capture_default_str();
    app->add_option("--rho", s.cfg.rho, "Toeplitz correlation")->capture_default_str();
    app->add_option("--tau", s.cfg.tau, "noise precision")->capture_default_str();
    app->add_option("--nu", s.cfg.nu, "sparsity level")->capture_default_str();
    app->add_option("--gamma-levels", s.cfg.gamma_levels, "true slab precision per group");
    app->add_option("--n-test", s.cfg.n_test)->capture_default_str();
    app->add_option("--seed", s.seed, "RNG seed (default: $GRAPER_SEED, else 0)");
}

ModelSpec resolve_spec(const FitFlags& f) {
    ModelSpec spec;
    spec.model = f.model == "logistic" ? ModelKind::logistic : ModelKind::linear;
    spec.factorization = f.factorization == "multivariate" ? Factorization::multivariate : Factorization::full;
    if (spec.factorization == Factorization::multivariate && !f.dense) {
        throw UnsupportedError(
            "--factorization multivariate is only available for the dense model; add --dense "
            "(the spike-and-slab prior requires --factorization full)");
    }
    return spec;
}

FitConfig resolve_fit_config(const FitFlags& f, std::uint64_t seed) {
    FitConfig c;
    c.max_iter = f.max_iter;
    c.elbo_rel_tol = f.tol;
    c.seed = seed;
    c.dense_only = f.dense;
    c.standardize = f.standardize == "on";
    c.intercept = f.intercept == "on";
    c.validate();
    f.hyper.validate();
    return c;
}

void check_threads(int threads) {
    if (threads < 1) {
        throw InputError("--threads must be at least 1");
    }
}

std::string join_path(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create directory " + dir + ": " + ec.message());
    }
}

void write_table(const std::string& path, const RunManifest& manifest, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << '#' << manifest.comment_line() << '\n' << body;
    if (!out) {
        throw Error("failed writing " + path);
    }
}

int cmd_fit(const FitFlags& f, const std::string& out_dir) {
    const std::uint64_t seed = resolve_seed(f.seed);
    const ModelSpec spec = resolve_spec(f);
    const FitConfig config = resolve_fit_config(f, seed);
    const Ingested in = ingest(f.data, f.groups);

    RunManifest m;
    m.command = "fit";
    m.data_path = f.data;
    m.groups_path = f.groups;
    m.output_path = out_dir;
    m.spec = spec;
    m.fit = config;
    m.hyper = f.hyper;
    m.seed = seed;

    const FitResult fit = fit_model(in.data, in.groups, f.hyper, config, spec);
    emit_fit(fit, in.groups, m, out_dir);
    fmt::print("{} iterations, {}, final objective {:.10g}\n", fit.summary.n_iterations,
               fit.summary.converged ? "converged" : "not converged", fit.summary.final_elbo);
    return 0;
}

int cmd_predict(const std::string& fit_path, const std::string& data_path, const std::string& out_path,
                bool classify) {
    const FitSummary summary = read_fit(fit_path);
    const Matrix X = read_features(data_path, summary.feature_names);
    Vector pred = predict(summary, X);
    if (classify) {
        if (summary.model != ModelKind::logistic) {
            throw InputError("--classify applies to logistic fits only");
        }
        pred = pred.unaryExpr([](double prob) { return prob > 0.5 ? 1.0 : 0.0; });
    }
    RunManifest m;
    m.command = "predict";
    m.fit_path = fit_path;
    m.data_path = data_path;
    m.output_path = out_path;
    m.extra["classify"] = classify;
    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < pred.size(); ++i) {
        rows.push_back({std::to_string(i + 1), csv::format_double(pred[i])});
    }
    write_csv_file(out_path, m, {"row", "prediction"}, rows);
    return 0;
}

int cmd_simulate(const SimFlags& s, const std::string& out_dir) {
    SimulationConfig cfg = s.cfg;
    cfg.seed = resolve_seed(s.seed);
    cfg.validate();

    RunManifest m;
    m.command = "simulate";
    m.output_path = out_dir;
    m.simulation = cfg;
    m.seed = cfg.seed;

    const SimulatedData sim = simulate_dataset(cfg);
    ensure_dir(out_dir);
    write_dataset_csv(join_path(out_dir, "train.csv"), m, sim.train);
    write_dataset_csv(join_path(out_dir, "test.csv"), m, sim.test);

    std::vector<std::vector<std::string>> groups;
    std::vector<std::vector<std::string>> truth;
    for (Index j = 0; j < cfg.p; ++j) {
        const std::string& name = sim.train.feature_names[static_cast<std::size_t>(j)];
        const std::string& label = sim.groups.labels()[static_cast<std::size_t>(sim.groups.group_of(j))];
        groups.push_back({name, label});
        truth.push_back({name, label, csv::format_double(sim.truth.beta_true[j]),
                         csv::format_double(sim.truth.s_true[j])});
    }
    write_csv_file(join_path(out_dir, "groups.csv"), m, {"feature", "group"}, groups);
    write_csv_file(join_path(out_dir, "truth.csv"), m, {"feature", "group", "beta_true", "s_true"}, truth);
    std::vector<std::vector<std::string>> group_truth;
    for (int k = 0; k < cfg.G; ++k) {
        group_truth.push_back({sim.groups.labels()[static_cast<std::size_t>(k)],
                               csv::format_double(sim.truth.gamma_true[k]), csv::format_double(sim.truth.pi_true[k])});
    }
    write_csv_file(join_path(out_dir, "group_truth.csv"), m, {"group", "gamma_true", "pi_true"}, group_truth);
    return 0;
}

int cmd_cv(const FitFlags& f, int folds, int threads, const std::string& out_dir) {
    const std::uint64_t seed = resolve_seed(f.seed);
    const ModelSpec spec = resolve_spec(f);
    const FitConfig config = resolve_fit_config(f, seed);
    if (folds < 2) {
        throw InputError("--folds must be at least 2");
    }
    check_threads(threads);
    const Ingested in = ingest(f.data, f.groups);
    if (in.data.n() < folds) {
        throw InputError(fmt::format("--folds {} exceeds the number of samples {}", folds, in.data.n()));
    }

    RunManifest m;
    m.command = "cv";
    m.data_path = f.data;
    m.groups_path = f.groups;
    m.output_path = out_dir;
    m.spec = spec;
    m.fit = config;
    m.hyper = f.hyper;
    m.folds = folds;
    m.threads = threads;
    m.seed = seed;

    const auto results = cross_validate(in.data, in.groups, f.hyper, config, CvOptions{folds, spec, threads});
    std::ostringstream body;
    write_cv_csv(body, results);
    ensure_dir(out_dir);
    write_table(join_path(out_dir, "cv.csv"), m, body.str());
    double total = 0.0;
    for (const auto& r : results) {
        total += spec.model == ModelKind::linear ? r.rmse : r.classification_error;
    }
    fmt::print("mean {} over {} folds: {:.6g}\n", spec.model == ModelKind::linear ? "RMSE" : "classification error",
               results.size(), total / static_cast<double>(results.size()));
    return 0;
}

std::vector<Variant> resolve_variants(const std::vector<std::string>& names) {
    std::vector<Variant> out;
    for (const auto& name : names) {
        out.push_back(find_variant(name));
    }
    return out;
}

FitConfig bench_fit_config(int max_iter, double tol) {
    FitConfig c;
    c.max_iter = max_iter;
    c.elbo_rel_tol = tol;
    c.validate();
    return c;
}

struct BenchFlags {
    std::vector<Index> n_values{50, 100, 200, 400};
    std::vector<Index> p_values{120, 240, 480, 960};
    std::vector<int> G_values{2, 4, 6, 10, 20};
    int replicates = 10;
    int sweeps = 0;
    std::vector<std::string> variants{"sparse", "dense", "multivariate"};
    int max_iter = 3000;
    double tol = 1e-5;
};

int cmd_bench(const SimFlags& s, const BenchFlags& b, const std::string& out_dir) {
    SimulationConfig base = s.cfg;
    base.seed = resolve_seed(s.seed);
    base.validate();
    BenchmarkOptions opt;
    opt.n_values = b.n_values;
    opt.p_values = b.p_values;
    opt.G_values = b.G_values;
    opt.replicates = b.replicates;
    opt.sweeps = b.sweeps;
    opt.variants = resolve_variants(b.variants);
    opt.config = bench_fit_config(b.max_iter, b.tol);
    if (b.replicates < 1 || b.sweeps < 0) {
        throw InputError("--replicates must be positive and --sweeps non-negative");
    }

    RunManifest m;
    m.command = "bench";
    m.output_path = out_dir;
    m.simulation = base;
    m.fit = opt.config;
    m.seed = base.seed;
    m.extra["n_values"] = b.n_values;
    m.extra["p_values"] = b.p_values;
    m.extra["G_values"] = b.G_values;
    m.extra["replicates"] = b.replicates;
    m.extra["sweeps"] = b.sweeps;
    m.extra["variants"] = b.variants;

    const auto rows = benchmark_runtime(base, opt);
    std::ostringstream body;
    write_timing_csv(body, rows);
    ensure_dir(out_dir);
    write_table(join_path(out_dir, "timing.csv"), m, body.str());
    return 0;
}

struct GridFlags {
    std::string sweep;
    std::vector<double> values;
    int replicates = 10;
    std::vector<std::string> variants;
    int threads = 1;
    int max_iter = 3000;
    double tol = 1e-5;
};

int cmd_grid(const SimFlags& s, const GridFlags& g, const std::string& out_dir) {
    SimulationConfig base = s.cfg;
    base.seed = resolve_seed(s.seed);
    base.validate();
    check_threads(g.threads);
    GridOptions opt;
    opt.parameter = parse_sweep_parameter(g.sweep);
    opt.values = g.values;
    opt.replicates = g.replicates;
    opt.variants = resolve_variants(g.variants);
    opt.config = bench_fit_config(g.max_iter, g.tol);
    opt.threads = g.threads;

    RunManifest m;
    m.command = "grid";
    m.output_path = out_dir;
    m.simulation = base;
    m.fit = opt.config;
    m.threads = g.threads;
    m.seed = base.seed;
    m.extra["sweep"] = g.sweep;
    m.extra["values"] = g.values.empty() ? default_sweep_values(opt.parameter) : g.values;
    m.extra["replicates"] = g.replicates;
    m.extra["variants"] = g.variants;

    const auto rows = run_grid(base, opt);
    std::ostringstream body;
    write_grid_csv(body, rows);
    ensure_dir(out_dir);
    write_table(join_path(out_dir, "grid.csv"), m, body.str());
    std::size_t failed = 0;
    for (const auto& r : rows) {
        failed += !r.error.empty();
    }
    fmt::print("{} rows, {} failed fits\n", rows.size(), failed);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Group-adaptive spike-and-slab regression with variational Bayes", "graper"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::function<int()> action;

    FitFlags fit_flags;
    std::string fit_out;
    auto* fit = app.add_subcommand("fit", "fit a model and write fit.json, elbo_trace.csv, coefficients.csv");
    add_fit_flags(fit, fit_flags);
    fit->add_option("--out", fit_out, "output directory")->required();
    fit->callback([&] { action = [&] { return cmd_fit(fit_flags, fit_out); }; });

    std::string predict_fit, predict_data, predict_out;
    bool classify = false;
    auto* pred = app.add_subcommand("predict", "predict from a saved fit");
    pred->add_option("--fit", predict_fit, "fit.json written by 'fit'")->required();
    pred->add_option("--data", predict_data, "CSV with the fit's feature columns")->required();
    pred->add_option("--out", predict_out, "output CSV")->required();
    pred->add_flag("--classify", classify, "logistic fits: output 0/1 labels instead of probabilities");
    pred->callback([&] { action = [&] { return cmd_predict(predict_fit, predict_data, predict_out, classify); }; });

    SimFlags sim_flags;
    std::string sim_out;
    auto* sim = app.add_subcommand("simulate", "simulate a grouped spike-and-slab dataset");
    add_sim_flags(sim, sim_flags);
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->callback([&] { action = [&] { return cmd_simulate(sim_flags, sim_out); }; });

    FitFlags cv_flags;
    int folds = 10;
    int cv_threads = 1;
    std::string cv_out;
    auto* cv = app.add_subcommand("cv", "k-fold cross-validation");
    add_fit_flags(cv, cv_flags);
    cv->add_option("--folds", folds)->capture_default_str();
    cv->add_option("--threads", cv_threads)->capture_default_str();
    cv->add_option("--out", cv_out, "output directory")->required();
    cv->callback([&] { action = [&] { return cmd_cv(cv_flags, folds, cv_threads, cv_out); }; });

    SimFlags bench_sim;
    BenchFlags bench_flags;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "runtime over n, p and G sweeps");
    add_sim_flags(bench, bench_sim);
    bench->add_option("--n-values", bench_flags.n_values)->capture_default_str();
    bench->add_option("--p-values", bench_flags.p_values)->capture_default_str();
    bench->add_option("--G-values", bench_flags.G_values)->capture_default_str();
    bench->add_option("--replicates", bench_flags.replicates)->capture_default_str();
    bench->add_option("--sweeps", bench_flags.sweeps, "fixed sweeps per fit (0: until converged)")
        ->capture_default_str();
    bench->add_option("--variants", bench_flags.variants)->capture_default_str();
    bench->add_option("--max-iter", bench_flags.max_iter)->capture_default_str();
    bench->add_option("--tol", bench_flags.tol)->capture_default_str();
    bench->add_option("--out", bench_out, "output directory")->required();
    bench->callback([&] { action = [&] { return cmd_bench(bench_sim, bench_flags, bench_out); }; });

    SimFlags grid_sim;
    GridFlags grid_flags;
    std::string grid_out;
    auto* grid = app.add_subcommand("grid", "simulation grid over one parameter");
    add_sim_flags(grid, grid_sim);
    grid->add_option("--sweep", grid_flags.sweep, "p, n, rho, tau or nu")
        ->required()
        ->check(CLI::IsMember({"p", "n", "rho", "tau", "nu"}));
    grid->add_option("--values", grid_flags.values, "override the default values of the swept parameter");
    grid->add_option("--replicates", grid_flags.replicates)->capture_default_str();
    grid->add_option("--variants", grid_flags.variants, "default: all");
    grid->add_option("--threads", grid_flags.threads)->capture_default_str();
    grid->add_option("--max-iter", grid_flags.max_iter)->capture_default_str();
    grid->add_option("--tol", grid_flags.tol)->capture_default_str();
    grid->add_option("--out", grid_out, "output directory")->required();
    grid->callback([&] { action = [&] { return cmd_grid(grid_sim, grid_flags, grid_out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        return action();
    } catch (const NumericalError& err) {
        fmt::print(stderr, "numerical failure: {}\n", err.what());
        return 2;
    } catch (const std::exception& err) {
        fmt::print(stderr, "error: {}\n", err.what());
        return 1;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"graper"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace graper::cli
