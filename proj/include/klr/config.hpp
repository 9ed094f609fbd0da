#pragma once

#include "klr/lab.hpp"

#include <optional>
#include <string>
#include <vector>

namespace klr {

// Parses a config object. A run manifest is accepted too: its "config" member is used.
// Errors name the offending field, or the line and column for malformed text.
ExperimentConfig parse_config(const std::string & text);
ExperimentConfig load_config(const std::string & path);

// Every field, defaults included, as a JSON object.
std::string config_json(const ExperimentConfig & cfg);

struct RunOverrides
{
    std::optional<unsigned> threads;
    bool deterministic = false;
    std::optional<std::string> output;
};

struct RunResult
{
    std::string experiment;
    std::string manifest;                 // JSON text
    std::vector<std::string> artifacts;   // paths written
    std::optional<EstimateReport> estimate;
    std::optional<ExposureTrace> trace;
};

// Runs the experiment a config names. With an output directory, writes the report (report.json and
// samples.csv, or trace.json) and manifest.json there.
RunResult run_config(const std::string & path, const RunOverrides & overrides = {});
RunResult run_config(ExperimentConfig cfg, const RunOverrides & overrides = {});

// report.json and samples.csv under dir; returns the paths.
std::vector<std::string> write_report(const ExperimentConfig & cfg, const EstimateReport & report, const std::string & dir);

} // namespace klr
