#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace vqht::cli {

struct ScenarioOutput {
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    std::vector<std::string> warnings;
    std::vector<std::string> files;  ///< relative to the output directory
    bool converged = true;
};

/// Runs the configured scenario and writes its CSV tables into out_dir.
ScenarioOutput run_scenario(const Settings& s, const std::filesystem::path& out_dir);

/// Named results of a direct oracle query. Inputs use the [oracle] keys.
std::vector<std::pair<std::string, double>> oracle_query(const Settings& s);

}  // namespace vqht::cli
