#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "graper/fit.hpp"
#include "graper/model.hpp"
#include "graper/simbench.hpp"

namespace graper::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Everything needed to reproduce a run. Written into every artifact.
struct RunManifest {
    std::string command;
    std::string data_path;
    std::string groups_path;
    std::string fit_path;
    std::string output_path;
    ModelSpec spec;
    FitConfig fit;
    HyperPriors hyper;
    SimulationConfig simulation;
    int folds = 0;
    int threads = 1;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();  // command-specific settings
    std::string tool_version = kToolVersion;
    std::uint64_t seed = 0;

    nlohmann::ordered_json to_json() const;
    // Single-line JSON, as embedded after '#' in CSV artifacts.
    std::string comment_line() const;
};

struct Ingested {
    Dataset data;
    GroupPartition groups;
};

// Data CSV: header row, first column `response`, the rest features. Groups
// CSV: `feature,group`, one row per feature; labels are numbered by first
// appearance. An empty groups path puts every feature in one group.
Ingested ingest(const std::string& data_path, const std::string& groups_path);

// Feature matrix for prediction, with columns reordered to `feature_names`.
// A leading `response` column is ignored.
Matrix read_features(const std::string& data_path, const std::vector<std::string>& feature_names);

// fit.json, elbo_trace.csv and coefficients.csv under `out_dir`.
void emit_fit(const FitResult& fit, const GroupPartition& groups, const RunManifest& manifest,
              const std::string& out_dir);

nlohmann::ordered_json fit_to_json(const FitSummary& summary, const GroupPartition& groups,
                                   const RunManifest& manifest);
FitSummary fit_from_json(const nlohmann::json& j);
FitSummary read_fit(const std::string& path);

// Writes `# manifest` then the header and rows.
void write_csv_file(const std::string& path, const RunManifest& manifest, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

void write_dataset_csv(const std::string& path, const RunManifest& manifest, const Dataset& data);

}  // namespace graper::cli
