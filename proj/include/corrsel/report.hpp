#pragma once

#include "corrsel/autospearman.hpp"
#include "corrsel/harness.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace corrsel {

inline constexpr int kReportSchemaVersion = 1;

// Ordered array of {phase, removed, kept, statistic}; an unbounded VIF
// statistic is written as the string "inf".
nlohmann::json trace_to_json(const EliminationTrace& trace);

nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

// Throws ConfigError on missing or malformed fields.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
// Complete config; parse_experiment_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const ExperimentConfig& config);

struct ExperimentReport {
    nlohmann::json payload;
    SubsetCollection grid;
    PerformanceRun performance;
};

// Loads or generates the dataset, runs the selection grid, consistency,
// correlation flags and performance deltas, and writes the report (and the
// optional per-cell CSV) when the config names an output path.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Report JSON without the "generated_at" field, serialized.
std::string report_payload_text(const nlohmann::json& report);

// Writes to a sibling temporary file, then renames it into place.
void write_text_atomically(const std::filesystem::path& path, const std::string& text);

std::string cells_csv(const ExperimentReport& report);

}  // namespace corrsel
