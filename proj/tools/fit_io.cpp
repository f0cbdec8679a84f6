#include "fit_io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <unordered_map>

#include "graper/csv.hpp"
#include "graper/errors.hpp"

namespace graper::cli {

using ojson = nlohmann::ordered_json;

namespace {

const char* to_string(ModelKind m) { return m == ModelKind::linear ? "linear" : "logistic"; }
const char* to_string(Factorization f) { return f == Factorization::full ? "full" : "multivariate"; }

ojson number(double x) {
    if (std::isnan(x)) {
        return nullptr;
    }
    return x;
}

double read_number(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

ojson vector_json(const Vector& v) {
    ojson a = ojson::array();
    for (Index i = 0; i < v.size(); ++i) {
        a.push_back(number(v[i]));
    }
    return a;
}

Vector read_vector(const nlohmann::json& j) {
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Index>(i)] = read_number(j[i]);
    }
    return v;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    std::size_t b = cell.find_first_not_of(" \t");
    std::size_t e = cell.find_last_not_of(" \t");
    if (b == std::string::npos) {
        throw InputError("missing value at row " + std::to_string(row) + ", column " + column);
    }
    const std::string trimmed = cell.substr(b, e - b + 1);
    double value = 0.0;
    const char* first = trimmed.data();
    const char* last = first + trimmed.size();
    if (*first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw InputError("non-numeric value '" + trimmed + "' at row " + std::to_string(row) + ", column " + column);
    }
    return value;
}

void check_width(const csv::Table& table, const std::string& path) {
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.header.size()) {
            throw InputError(path + ": row " + std::to_string(r + 1) + " has " + std::to_string(table.rows[r].size()) +
                             " fields, header has " + std::to_string(table.header.size()));
        }
    }
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create directory " + dir + ": " + ec.message());
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    return out;
}

}  // namespace

ojson RunManifest::to_json() const {
    ojson j;
    j["command"] = command;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    if (!data_path.empty()) j["data"] = data_path;
    if (!groups_path.empty()) j["groups"] = groups_path;
    if (!fit_path.empty()) j["fit"] = fit_path;
    if (!output_path.empty()) j["out"] = output_path;
    if (command == "fit" || command == "cv" || command == "bench" || command == "grid") {
        j["model"] = to_string(spec.model);
        j["factorization"] = to_string(spec.factorization);
        j["fit_config"] = {{"max_iter", fit.max_iter},       {"min_iter", fit.min_iter},
                           {"elbo_rel_tol", fit.elbo_rel_tol}, {"seed", fit.seed},
                           {"dense_only", fit.dense_only},   {"standardize", fit.standardize},
                           {"intercept", fit.intercept}};
        j["hyperpriors"] = {{"r_tau", hyper.r_tau},     {"d_tau", hyper.d_tau}, {"r_gamma", hyper.r_gamma},
                            {"d_gamma", hyper.d_gamma}, {"d_pi", hyper.d_pi},   {"r_pi", hyper.r_pi}};
    }
    if (command == "simulate" || command == "bench" || command == "grid") {
        ojson levels = ojson::array();
        for (double g : simulation.gamma_levels) levels.push_back(g);
        j["simulation"] = {{"n", simulation.n},   {"p", simulation.p},     {"G", simulation.G},
                           {"rho", simulation.rho}, {"tau", simulation.tau}, {"nu", simulation.nu},
                           {"gamma_levels", levels}, {"seed", simulation.seed}, {"n_test", simulation.n_test}};
    }
    if (command == "cv") {
        j["folds"] = folds;
    }
    if (command == "cv" || command == "grid") {
        j["threads"] = threads;
    }
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        j[it.key()] = it.value();
    }
    return j;
}

std::string RunManifest::comment_line() const { return " " + to_json().dump(); }

Ingested ingest(const std::string& data_path, const std::string& groups_path) {
    const csv::Table table = csv::read_file(data_path);
    if (table.header.empty() || table.header.front() != "response") {
        throw InputError(data_path + ": first column must be named 'response'");
    }
    if (table.header.size() < 2) {
        throw InputError(data_path + ": no feature columns");
    }
    if (table.rows.empty()) {
        throw InputError(data_path + ": no data rows");
    }
    check_width(table, data_path);

    Ingested out;
    Dataset& d = out.data;
    const Index n = static_cast<Index>(table.rows.size());
    const Index p = static_cast<Index>(table.header.size()) - 1;
    d.feature_names.assign(table.header.begin() + 1, table.header.end());
    std::unordered_map<std::string, Index> column_of;
    for (Index j = 0; j < p; ++j) {
        if (!column_of.emplace(d.feature_names[static_cast<std::size_t>(j)], j).second) {
            throw InputError(data_path + ": duplicate feature column " + d.feature_names[static_cast<std::size_t>(j)]);
        }
    }
    d.X.resize(n, p);
    d.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        const std::size_t row_number = static_cast<std::size_t>(i) + 1;
        d.y[i] = parse_cell(row[0], row_number, "response");
        for (Index j = 0; j < p; ++j) {
            d.X(i, j) = parse_cell(row[static_cast<std::size_t>(j) + 1], row_number,
                                   d.feature_names[static_cast<std::size_t>(j)]);
        }
    }

    if (groups_path.empty()) {
        out.groups = GroupPartition::single_group(p);
        return out;
    }
    const csv::Table gt = csv::read_file(groups_path);
    if (gt.header.size() != 2 || gt.header[0] != "feature" || gt.header[1] != "group") {
        throw InputError(groups_path + ": header must be 'feature,group'");
    }
    check_width(gt, groups_path);
    std::vector<int> assignment(static_cast<std::size_t>(p), -1);
    std::vector<std::string> labels;
    std::map<std::string, int> label_index;
    for (const auto& row : gt.rows) {
        const auto& feature = row[0];
        const auto it = column_of.find(feature);
        if (it == column_of.end()) {
            throw InputError(groups_path + ": feature " + feature + " does not appear in the data");
        }
        int& slot = assignment[static_cast<std::size_t>(it->second)];
        if (slot != -1) {
            throw InputError(groups_path + ": duplicate feature " + feature);
        }
        auto [pos, inserted] = label_index.emplace(row[1], static_cast<int>(labels.size()));
        if (inserted) {
            labels.push_back(row[1]);
        }
        slot = pos->second;
    }
    for (Index j = 0; j < p; ++j) {
        if (assignment[static_cast<std::size_t>(j)] == -1) {
            throw InputError("feature " + d.feature_names[static_cast<std::size_t>(j)] + " is missing from " +
                             groups_path);
        }
    }
    out.groups = GroupPartition(std::move(assignment), std::move(labels));
    return out;
}

Matrix read_features(const std::string& data_path, const std::vector<std::string>& feature_names) {
    const csv::Table table = csv::read_file(data_path);
    check_width(table, data_path);
    std::unordered_map<std::string, std::size_t> column_of;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == 0 && table.header[c] == "response") {
            continue;
        }
        column_of.emplace(table.header[c], c);
    }
    std::vector<std::size_t> columns;
    for (const auto& name : feature_names) {
        const auto it = column_of.find(name);
        if (it == column_of.end()) {
            throw InputError(data_path + ": feature " + name + " used by the fit is missing");
        }
        columns.push_back(it->second);
    }
    Matrix X(static_cast<Index>(table.rows.size()), static_cast<Index>(columns.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            X(static_cast<Index>(i), static_cast<Index>(j)) =
                parse_cell(table.rows[i][columns[j]], i + 1, table.header[columns[j]]);
        }
    }
    return X;
}

ojson fit_to_json(const FitSummary& s, const GroupPartition& groups, const RunManifest& manifest) {
    ojson j;
    j["manifest"] = manifest.to_json();
    j["model"] = to_string(s.model);
    j["factorization"] = to_string(s.factorization);
    j["dense"] = s.dense;
    j["feature_names"] = s.feature_names;
    j["group_labels"] = groups.labels();
    j["group_assignment"] = groups.assignment();
    j["beta_hat"] = vector_json(s.beta_hat);
    j["inclusion_prob"] = vector_json(s.inclusion_prob);
    j["gamma_hat"] = vector_json(s.gamma_hat);
    j["pi_hat"] = vector_json(s.pi_hat);
    j["tau_hat"] = number(s.tau_hat);
    j["intercept"] = number(s.intercept);
    j["n_iterations"] = s.n_iterations;
    j["converged"] = s.converged;
    j["final_elbo"] = number(s.final_elbo);
    j["transform"] = {{"feature_means", vector_json(s.transform.feature_means)},
                      {"feature_sds", vector_json(s.transform.feature_sds)},
                      {"response_mean", number(s.transform.response_mean)},
                      {"standardized", s.transform.standardized},
                      {"centered", s.transform.centered}};
    return j;
}

FitSummary fit_from_json(const nlohmann::json& j) {
    try {
        FitSummary s;
        s.model = j.at("model").get<std::string>() == "logistic" ? ModelKind::logistic : ModelKind::linear;
        s.factorization =
            j.at("factorization").get<std::string>() == "multivariate" ? Factorization::multivariate : Factorization::full;
        s.dense = j.at("dense").get<bool>();
        s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        s.beta_hat = read_vector(j.at("beta_hat"));
        s.inclusion_prob = read_vector(j.at("inclusion_prob"));
        s.gamma_hat = read_vector(j.at("gamma_hat"));
        s.pi_hat = read_vector(j.at("pi_hat"));
        s.tau_hat = read_number(j.at("tau_hat"));
        s.intercept = read_number(j.at("intercept"));
        s.n_iterations = j.at("n_iterations").get<int>();
        s.converged = j.at("converged").get<bool>();
        s.final_elbo = read_number(j.at("final_elbo"));
        const auto& t = j.at("transform");
        s.transform.feature_means = read_vector(t.at("feature_means"));
        s.transform.feature_sds = read_vector(t.at("feature_sds"));
        s.transform.response_mean = read_number(t.at("response_mean"));
        s.transform.standardized = t.at("standardized").get<bool>();
        s.transform.centered = t.at("centered").get<bool>();
        const Index p = s.beta_hat.size();
        if (s.transform.feature_sds.size() != p || s.transform.feature_means.size() != p ||
            static_cast<Index>(s.feature_names.size()) != p) {
            throw InputError("fit file has inconsistent feature counts");
        }
        return s;
    } catch (const nlohmann::json::exception& err) {
        throw InputError(std::string("malformed fit file: ") + err.what());
    }
}

FitSummary read_fit(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& err) {
        throw InputError(path + ": " + err.what());
    }
    return fit_from_json(j);
}

void write_csv_file(const std::string& path, const RunManifest& manifest, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
    auto out = open_output(path);
    out << '#' << manifest.comment_line() << '\n';
    csv::write_row(out, header);
    for (const auto& row : rows) {
        csv::write_row(out, row);
    }
    if (!out) {
        throw Error("failed writing " + path);
    }
}

void write_dataset_csv(const std::string& path, const RunManifest& manifest, const Dataset& data) {
    std::vector<std::string> header{"response"};
    header.insert(header.end(), data.feature_names.begin(), data.feature_names.end());
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(data.n()));
    for (Index i = 0; i < data.n(); ++i) {
        auto& row = rows[static_cast<std::size_t>(i)];
        row.reserve(static_cast<std::size_t>(data.p()) + 1);
        row.push_back(csv::format_double(data.y[i]));
        for (Index j = 0; j < data.p(); ++j) {
            row.push_back(csv::format_double(data.X(i, j)));
        }
    }
    write_csv_file(path, manifest, header, rows);
}

void emit_fit(const FitResult& fit, const GroupPartition& groups, const RunManifest& manifest,
              const std::string& out_dir) {
    ensure_directory(out_dir);
    const std::filesystem::path dir(out_dir);
    {
        auto out = open_output((dir / "fit.json").string());
        out << fit_to_json(fit.summary, groups, manifest).dump(2) << '\n';
        if (!out) {
            throw Error("failed writing fit.json");
        }
    }
    std::vector<std::vector<std::string>> trace;
    for (std::size_t t = 0; t < fit.elbo_trace.size(); ++t) {
        trace.push_back({std::to_string(t + 1), csv::format_double(fit.elbo_trace[t])});
    }
    write_csv_file((dir / "elbo_trace.csv").string(), manifest, {"iteration", "elbo"}, trace);

    const FitSummary& s = fit.summary;
    std::vector<std::vector<std::string>> coefs;
    for (Index j = 0; j < s.beta_hat.size(); ++j) {
        coefs.push_back({s.feature_names[static_cast<std::size_t>(j)],
                         groups.labels()[static_cast<std::size_t>(groups.group_of(j))],
                         csv::format_double(s.beta_hat[j]), csv::format_double(s.inclusion_prob[j])});
    }
    write_csv_file((dir / "coefficients.csv").string(), manifest, {"feature", "group", "beta_hat", "inclusion_prob"},
                   coefs);
}

}  // namespace graper::cli
