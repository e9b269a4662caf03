#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "celldiff/config.hpp"
#include "celldiff/errors.hpp"
#include "celldiff/output.hpp"
#include "celldiff/scenarios.hpp"
#include "celldiff/transport.hpp"

namespace {

using celldiff::json;

void write_diagnostic(const std::filesystem::path& dir, const celldiff::StepError& e) {
    const auto& s = e.last_valid();
    const json d = {{"error", e.what()}, {"t", s.t}, {"w", s.w}, {"v", s.v}, {"u", s.u}};
    const auto path = dir / "diagnostic.json";
    celldiff::write_text(path, d.dump(2) + "\n");
    std::cerr << "numerical failure: " << e.what() << "\ndiagnostic written to " << path.string()
              << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and stability analysis of a structured cell-differentiation model"};
    app.require_subcommand(1);

    std::string scenario, config_path, out_dir;
    bool plots = false;
    auto* run = app.add_subcommand("run", "Run a named scenario");
    run->add_option("scenario", scenario, "Scenario name")->required();
    run->add_option("--config", config_path, "JSON scenario config");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--plots", plots, "Write SVG line charts");

    std::string steady_config, steady_out = ".";
    auto* steady = app.add_subcommand("steady", "Compute the steady state of a model");
    steady->add_option("--config", steady_config, "JSON model config")->required();
    steady->add_option("--out", steady_out, "Output directory");

    std::string variant, stab_config, stab_out = ".";
    std::vector<std::string> kv;
    auto* stab = app.add_subcommand("stability", "Analyse a characteristic equation");
    stab->add_option("variant", variant, "delay | reduced | general | hopf | heaviside")->required();
    stab->add_option("params", kv, "key=value numeric parameters");
    stab->add_option("--config", stab_config, "JSON parameter file");
    stab->add_option("--out", stab_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    std::filesystem::path diag_dir = ".";
    try {
        if (*run) {
            celldiff::ScenarioConfig cfg;
            if (!config_path.empty()) cfg = celldiff::parse_scenario_config(celldiff::load_json(config_path));
            if (!cfg.scenario.empty() && cfg.scenario != scenario) {
                throw celldiff::ConfigError("config names scenario '" + cfg.scenario +
                                            "' but '" + scenario + "' was requested");
            }
            cfg.scenario = scenario;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            else if (config_path.empty()) cfg.out_dir = std::filesystem::path("out") / scenario;
            cfg.plots = cfg.plots || plots;
            diag_dir = cfg.out_dir;
            const auto result = celldiff::run_scenario(cfg);
            std::cout << scenario << ": " << (result.passed ? "passed" : "FAILED") << " ("
                      << result.files.size() << " files in " << cfg.out_dir.string() << ")\n";
            return result.passed ? 0 : 1;
        }
        if (*steady) {
            diag_dir = steady_out;
            const auto s = celldiff::run_steady(celldiff::load_json(steady_config), steady_out);
            std::cout << s.dump(2) << "\n";
            return 0;
        }
        json params = stab_config.empty() ? json::object() : celldiff::load_json(stab_config);
        for (const auto& item : kv) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw celldiff::ConfigError("stability parameter '" + item + "' is not key=value");
            }
            params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        }
        diag_dir = stab_out;
        const auto s = celldiff::run_stability(variant, params, stab_out);
        std::cout << s.dump(2) << "\n";
        return 0;
    } catch (const celldiff::StepError& e) {
        write_diagnostic(diag_dir, e);
        return 3;
    } catch (const celldiff::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
