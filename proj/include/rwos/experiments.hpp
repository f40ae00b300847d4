#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace rwos {

/// One declared comparison inside an experiment. tolerance is fixed before the run.
struct Check {
    std::string name;
    nlohmann::json value;
    nlohmann::json target;
    double tolerance = 0.0;
    std::string rule;        // how value and target are compared
    std::string provenance;  // where the target comes from
    bool passed = false;
    nlohmann::json info;     // extra numbers printed alongside, never used for the verdict
    nlohmann::json to_json() const;
};

struct ExperimentReport {
    std::string name;
    nlohmann::json settings;
    std::uint64_t seed = 0;
    std::vector<Check> checks;
    bool passed = false;
    double wall_clock = 0.0;  // seconds; the only field that varies between identical runs
    nlohmann::json to_json() const;
};

struct ExperimentInfo {
    std::string name;
    std::string summary;
    bool stochastic = false;
    nlohmann::json defaults;
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo& experiment_info(const std::string& name);

/// Runs a named experiment. overrides may only name keys present in the defaults, with the same
/// JSON type; anything else is an invalid_argument error.
ExperimentReport run_experiment(const std::string& name, const nlohmann::json& overrides, std::uint64_t seed,
                                unsigned threads = 1);

}  // namespace rwos
