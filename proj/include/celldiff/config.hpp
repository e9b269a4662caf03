#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "celldiff/model.hpp"

namespace celldiff {

using json = nlohmann::json;

/// Parses a JSON file; ConfigError if it is missing or malformed.
json load_json(const std::filesystem::path& path);

/// A number (constant on [x_begin, x_end]) or {"nodes": [...], "values": [...]}.
CoefficientTable parse_table(const json& j, double x_begin, double x_end);

/// Continuous model description. Recognized keys:
///   x_begin, x_star, k, mu, epsilon, v_max, a, p (tables),
///   g: "true_data" | number | {"x_nodes", "v_nodes", "values"},
///   alpha: {"a_w", "p_w"} (TrueData with the model's k),
///   boundary: "simplified" | "general".
/// Unknown keys are rejected.
ContinuousModelSpec parse_continuous_spec(const json& j);

/// {"a": [...], "p": [...], "d": [...], "k": ...}.
DiscreteModelParams parse_discrete(const json& j);

/// Resolves a preset file name against CELLDIFF_PRESETS (environment) or the build-time
/// preset directory. ConfigError if the file does not exist.
std::filesystem::path preset_path(const std::string& name);

/// The eight-compartment hematopoiesis preset shipped as table1.json.
DiscreteModelParams load_table1();

struct ScenarioConfig {
    std::string scenario;
    json params = json::object();  // scenario defaults merged with user overrides
    std::filesystem::path out_dir = "out";
    bool plots = false;
};

/// Reads {"scenario": ..., "params": {...}, "outputs": {"dir": ..., "plots": ...}}.
/// Command-line values, when given, take precedence over the file.
ScenarioConfig parse_scenario_config(const json& j);

}  // namespace celldiff
