#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "../tools/cli.hpp"
#include "../tools/fit_io.hpp"
#include "graper/csv.hpp"
#include "graper/errors.hpp"
#include "graper/fit.hpp"
#include "graper/simbench.hpp"
#include "helpers.hpp"

using namespace graper;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string ingest_error(const fs::path& data, const std::string& groups = "") {
    try {
        cli::ingest(data.string(), groups);
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

struct ScopedEnv {
    explicit ScopedEnv(const char* value) {
        if (value) ::setenv("GRAPER_SEED", value, 1);
        else ::unsetenv("GRAPER_SEED");
    }
    ~ScopedEnv() { ::unsetenv("GRAPER_SEED"); }
};

}  // namespace

TEST_CASE("ingest: data and groups") {
    const auto dir = test::temp_dir("ingest");
    write_text(dir / "d.csv", "response,a,b,c\n1,2,3,4\n5,6,7,8\n");
    write_text(dir / "g.csv", "feature,group\nc,late\na,early\nb,late\n");
    const cli::Ingested in = cli::ingest((dir / "d.csv").string(), (dir / "g.csv").string());
    CHECK(in.data.n() == 2);
    CHECK(in.data.p() == 3);
    CHECK(in.data.y == (Vector(2) << 1, 5).finished());
    CHECK(in.data.X(1, 2) == 8.0);
    CHECK(in.data.feature_names == std::vector<std::string>{"a", "b", "c"});
    CHECK(in.groups.labels() == std::vector<std::string>{"late", "early"});
    CHECK(in.groups.assignment() == std::vector<int>{1, 0, 0});

    const cli::Ingested single = cli::ingest((dir / "d.csv").string(), "");
    CHECK(single.groups.num_groups() == 1);
    CHECK(single.groups.num_features() == 3);

    write_text(dir / "q.csv", "# note\nresponse,\"a,1\"\r\n3,\"4\"\r\n");
    CHECK(cli::ingest((dir / "q.csv").string(), "").data.feature_names == std::vector<std::string>{"a,1"});
}

TEST_CASE("ingest: errors") {
    const auto dir = test::temp_dir("ingest_err");
    write_text(dir / "missing.csv", "response,a,b\n1,2,3\n4,,6\n");
    CHECK(contains(ingest_error(dir / "missing.csv"), "missing value at row 2, column a"));
    write_text(dir / "text.csv", "response,a\n1,x7\n");
    CHECK(contains(ingest_error(dir / "text.csv"), "non-numeric value 'x7' at row 1, column a"));
    write_text(dir / "noresp.csv", "y,a\n1,2\n");
    CHECK(contains(ingest_error(dir / "noresp.csv"), "response"));
    write_text(dir / "short.csv", "response,a,b\n1,2\n");
    CHECK_FALSE(ingest_error(dir / "short.csv").empty());
    CHECK_FALSE(ingest_error(dir / "absent.csv").empty());

    write_text(dir / "d.csv", "response,a,b\n1,2,3\n");
    write_text(dir / "dup.csv", "feature,group\na,1\na,2\nb,1\n");
    CHECK(contains(ingest_error(dir / "d.csv", (dir / "dup.csv").string()), "duplicate feature a"));
    write_text(dir / "unknown.csv", "feature,group\na,1\nb,1\nz,1\n");
    CHECK(contains(ingest_error(dir / "d.csv", (dir / "unknown.csv").string()), "z"));
    write_text(dir / "partial.csv", "feature,group\na,1\n");
    CHECK(contains(ingest_error(dir / "d.csv", (dir / "partial.csv").string()), "feature b is missing"));
    write_text(dir / "header.csv", "name,group\na,1\nb,1\n");
    CHECK(contains(ingest_error(dir / "d.csv", (dir / "header.csv").string()), "feature,group"));
}

TEST_CASE("read_features reorders columns by name") {
    const auto dir = test::temp_dir("features");
    write_text(dir / "x.csv", "response,b,a\n0,1,2\n0,3,4\n");
    const Matrix X = cli::read_features((dir / "x.csv").string(), {"a", "b"});
    CHECK(X == (Matrix(2, 2) << 2, 1, 4, 3).finished());
    write_text(dir / "y.csv", "a,b\n2,1\n");
    CHECK(cli::read_features((dir / "y.csv").string(), {"b"})(0, 0) == 1.0);
    CHECK_THROWS_AS(cli::read_features((dir / "y.csv").string(), {"c"}), InputError);
}

TEST_CASE("emitted fit artifacts") {
    const auto dir = test::temp_dir("emit");
    Rng rng(8);
    Dataset d = test::linear_data(30, 6, rng);
    for (Index j = 0; j < 6; ++j) d.feature_names.push_back("x" + std::to_string(j));
    const GroupPartition g = GroupPartition::contiguous(6, 2);
    const FitResult fit = fit_model(d, g, HyperPriors{}, FitConfig{}, ModelSpec{});
    cli::RunManifest m;
    m.command = "fit";
    m.seed = 11;
    cli::emit_fit(fit, g, m, dir.string());

    std::vector<std::string> comments;
    const csv::Table coefs = csv::read_file((dir / "coefficients.csv").string(), &comments);
    CHECK(coefs.header == std::vector<std::string>{"feature", "group", "beta_hat", "inclusion_prob"});
    CHECK(coefs.rows.size() == 6);
    REQUIRE(comments.size() == 1);
    CHECK(nlohmann::json::parse(comments[0])["seed"] == 11);
    const csv::Table trace = csv::read_file((dir / "elbo_trace.csv").string());
    CHECK(trace.rows.size() == fit.elbo_trace.size());
    CHECK(std::stod(trace.rows.back()[1]) == fit.elbo_trace.back());

    const FitSummary back = cli::read_fit((dir / "fit.json").string());
    CHECK(back.beta_hat == fit.summary.beta_hat);
    CHECK(back.intercept == fit.summary.intercept);
    CHECK(back.feature_names == d.feature_names);
    const Vector a = predict(fit.summary, d.X), b = predict(back, d.X);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-15 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("fit.json round trip for a logistic fit") {
    Rng rng(9);
    Dataset d = test::binary_data(40, 5, rng);
    for (Index j = 0; j < 5; ++j) d.feature_names.push_back("v" + std::to_string(j));
    const GroupPartition g = GroupPartition::single_group(5);
    const FitResult fit = fit_model(d, g, HyperPriors{}, FitConfig{}, ModelSpec{ModelKind::logistic, Factorization::full});
    cli::RunManifest m;
    m.command = "fit";
    const nlohmann::json j = nlohmann::json::parse(cli::fit_to_json(fit.summary, g, m).dump());
    CHECK(j["tau_hat"].is_null());
    const FitSummary back = cli::fit_from_json(j);
    CHECK(back.model == ModelKind::logistic);
    CHECK(std::isnan(back.tau_hat));
    CHECK(predict(back, d.X) == predict(fit.summary, d.X));
}

TEST_CASE("cli: exit codes") {
    const auto dir = test::temp_dir("exit");
    CHECK(cli::run({"--version"}) == 0);
    CHECK(cli::run(std::vector<std::string>{}) == 1);
    CHECK(cli::run({"fit", "--bogus"}) == 1);
    CHECK(cli::run({"fit", "--data", (dir / "none.csv").string(), "--out", dir.string()}) == 1);

    write_text(dir / "d.csv", "response,a,b\n1,2,3\n2,3,1\n3,1,5\n4,0,2\n");
    CHECK(cli::run({"fit", "--data", (dir / "d.csv").string(), "--out", (dir / "ok").string()}) == 0);
    CHECK(fs::exists(dir / "ok" / "fit.json"));
    CHECK(cli::run({"fit", "--data", (dir / "d.csv").string(), "--factorization", "multivariate", "--out",
                    (dir / "mv").string()}) == 1);
    CHECK(cli::run({"fit", "--data", (dir / "d.csv").string(), "--factorization", "multivariate", "--dense",
                    "--out", (dir / "mv").string()}) == 0);
    CHECK(cli::run({"fit", "--data", (dir / "d.csv").string(), "--model", "probit", "--out", dir.string()}) == 1);
    CHECK(cli::run({"fit", "--data", (dir / "d.csv").string(), "--model", "logistic", "--out", dir.string()}) == 1);
    CHECK(cli::run({"fit", "--data", (dir / "d.csv").string(), "--r-tau", "-1", "--out", dir.string()}) == 1);

    // Overflowing magnitudes make the objective non-finite.
    write_text(dir / "huge.csv", "response,a,b\n1e300,1e300,3\n-1e300,2e300,1\n2e300,-1e300,5\n");
    CHECK(cli::run({"fit", "--data", (dir / "huge.csv").string(), "--standardize", "off", "--intercept", "off",
                    "--out", (dir / "huge").string()}) == 2);
}

TEST_CASE("cli: seed from the environment") {
    const auto dir = test::temp_dir("seed");
    {
        ScopedEnv env("42");
        CHECK(cli::run({"simulate", "--n", "10", "--p", "12", "--G", "2", "--n-test", "5", "--out", (dir / "env").string()}) == 0);
    }
    CHECK(cli::run({"simulate", "--n", "10", "--p", "12", "--G", "2", "--n-test", "5", "--seed", "42", "--out",
                    (dir / "flag").string()}) == 0);
    CHECK(csv::read_file((dir / "env" / "train.csv").string()).rows ==
          csv::read_file((dir / "flag" / "train.csv").string()).rows);
    {
        ScopedEnv env("-3");
        CHECK(cli::run({"simulate", "--out", (dir / "bad").string()}) == 1);
    }
    {
        ScopedEnv env("7");
        std::vector<std::string> comments;
        cli::run({"simulate", "--n", "10", "--p", "12", "--G", "2", "--n-test", "5", "--seed", "3", "--out",
                  (dir / "override").string()});
        csv::read_file((dir / "override" / "train.csv").string(), &comments);
        CHECK(nlohmann::json::parse(comments.at(0))["seed"] == 3);
    }
}

TEST_CASE("cli: simulate, fit, predict, cv, bench, grid") {
    const auto dir = test::temp_dir("pipeline");
    const std::string sim = (dir / "sim").string();
    REQUIRE(cli::run({"simulate", "--n", "40", "--p", "24", "--G", "4", "--n-test", "20", "--seed", "5", "--out", sim}) == 0);
    for (const char* f : {"train.csv", "test.csv", "groups.csv", "truth.csv", "group_truth.csv"})
        CHECK(fs::exists(fs::path(sim) / f));
    const std::string first = read_text(fs::path(sim) / "train.csv");
    REQUIRE(cli::run({"simulate", "--n", "40", "--p", "24", "--G", "4", "--n-test", "20", "--seed", "5", "--out", sim}) == 0);
    CHECK(read_text(fs::path(sim) / "train.csv") == first);

    SimulationConfig cfg;
    cfg.n = 40;
    cfg.p = 24;
    cfg.G = 4;
    cfg.n_test = 20;
    cfg.seed = 5;
    const SimulatedData data = simulate_dataset(cfg);
    const csv::Table train = csv::read_file((fs::path(sim) / "train.csv").string());
    CHECK(train.rows.size() == 40);
    CHECK(std::stod(train.rows[3][2]) == data.train.X(3, 1));
    CHECK(csv::read_file((fs::path(sim) / "group_truth.csv").string()).rows.size() == 4);

    const std::string out = (dir / "fit").string();
    REQUIRE(cli::run({"fit", "--data", sim + "/train.csv", "--groups", sim + "/groups.csv", "--out", out}) == 0);
    REQUIRE(cli::run({"predict", "--fit", out + "/fit.json", "--data", sim + "/test.csv", "--out",
                      (dir / "pred.csv").string()}) == 0);
    const csv::Table pred = csv::read_file((dir / "pred.csv").string());
    CHECK(pred.header == std::vector<std::string>{"row", "prediction"});
    REQUIRE(pred.rows.size() == 20);

    const FitResult direct = fit_model(data.train, data.groups, HyperPriors{}, FitConfig{}, ModelSpec{});
    const Vector expected = predict(direct.summary, data.test.X);
    for (Index i = 0; i < 20; ++i)
        CHECK(std::abs(std::stod(pred.rows[static_cast<std::size_t>(i)][1]) - expected[i]) <=
              1e-15 * std::max(1.0, std::abs(expected[i])));
    CHECK(cli::run({"predict", "--fit", out + "/fit.json", "--data", sim + "/test.csv", "--classify", "--out",
                    (dir / "cls.csv").string()}) == 1);

    REQUIRE(cli::run({"cv", "--data", sim + "/train.csv", "--groups", sim + "/groups.csv", "--folds", "4",
                      "--threads", "2", "--out", (dir / "cv").string()}) == 0);
    CHECK(csv::read_file((dir / "cv" / "cv.csv").string()).rows.size() == 4);
    CHECK(cli::run({"cv", "--data", sim + "/train.csv", "--folds", "41", "--out", (dir / "cv2").string()}) == 1);

    REQUIRE(cli::run({"bench", "--p", "24", "--G", "4", "--n-values", "30", "--p-values", "24", "--G-values", "2",
                      "--replicates", "1", "--sweeps", "3", "--variants", "sparse", "dense", "--out",
                      (dir / "bench").string()}) == 0);
    CHECK(csv::read_file((dir / "bench" / "timing.csv").string()).rows.size() == 6);

    REQUIRE(cli::run({"grid", "--p", "24", "--G", "4", "--n-test", "20", "--sweep", "n", "--values", "30", "60",
                      "--replicates", "1", "--variants", "sparse", "--out", (dir / "grid").string()}) == 0);
    CHECK(csv::read_file((dir / "grid" / "grid.csv").string()).rows.size() == 2);
    CHECK(cli::run({"grid", "--sweep", "G", "--out", (dir / "grid2").string()}) == 1);
    CHECK(cli::run({"grid", "--sweep", "n", "--variants", "ridge", "--out", (dir / "grid3").string()}) == 1);
}
