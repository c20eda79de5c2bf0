#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "voxsel/experiment.hpp"

namespace voxsel {

// Flat key-value experiment configuration ("key = value" lines, '#' comments).
// Unknown keys are rejected.
struct RunConfig {
    std::string dataset_path;
    std::string id_column = "id";
    std::string label_column = "class";
    std::optional<std::string> group_override;

    ExperimentSpec spec;        // spec.repetitions = stage-1 repetitions
    int reps_stage2 = 30;
    std::size_t union_lower = 30;
    std::size_t union_upper = 50;

    std::string raw_text;       // exact bytes, for the manifest digest
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

struct RunManifest {
    std::string config_digest;  // fnv1a-64 hex of the config bytes
    std::string tool_version;
    std::uint64_t master_seed = 0;
    std::string started_at;     // ISO 8601 UTC
    std::string finished_at;
    std::map<std::string, std::string> outputs;  // logical name -> path
};

std::string manifest_to_json(const RunManifest& m);
std::string iso8601_utc_now();
std::string config_digest(const std::string& bytes);

extern const char* const kToolVersion;

}  // namespace voxsel
