#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "celldiff/config.hpp"
#include "celldiff/output.hpp"

namespace celldiff {

/// Files and machine-readable summary produced by one scenario.
struct OutputBundle {
    std::string scenario;
    std::filesystem::path dir;
    std::vector<std::pair<std::string, CsvTable>> tables;   // file name -> table
    std::vector<std::pair<std::string, LineChart>> charts;  // file name -> chart
    json summary = json::object();
};

struct ScenarioResult {
    bool passed = false;
    json summary;
    std::vector<std::filesystem::path> files;
};

const std::vector<std::string>& scenario_names();

/// Scenario defaults; user params are merged over these (JSON merge patch).
json scenario_defaults(const std::string& name);

/// Runs the named scenario and writes its CSVs, summary.json and, if requested, SVGs.
/// ConfigError for unknown names (the message lists the registered ones).
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Builds the bundle without writing anything.
OutputBundle build_scenario(const ScenarioConfig& config);

std::vector<std::filesystem::path> write_bundle(const OutputBundle& bundle, bool plots);

/// One SVG per chart of the bundle.
std::vector<std::filesystem::path> emit_plots(const OutputBundle& bundle);

/// Steady state of the model in `config` ({"model": {...}, "I": n, "method":
/// "quadrature" | "scheme"}); writes steady.csv with a commented header block.
json run_steady(const json& config, const std::filesystem::path& out_dir);

/// Characteristic-equation analysis. Variants: delay, reduced, hopf, heaviside, general.
json run_stability(const std::string& variant, const json& params,
                   const std::filesystem::path& out_dir);

/// Number of sign changes of successive differences of y over samples with t >= t_from.
int derivative_sign_changes(const std::vector<double>& t, const std::vector<double>& y,
                            double t_from);

/// Least-squares slope of ln y against t over samples with t >= t_from (y > 0).
double log_slope(const std::vector<double>& t, const std::vector<double>& y, double t_from);

}  // namespace celldiff
