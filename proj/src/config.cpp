#include "celldiff/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "celldiff/errors.hpp"

#ifndef CELLDIFF_PRESET_DIR
#define CELLDIFF_PRESET_DIR "presets"
#endif

namespace celldiff {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& what) {
    if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(what + ": unknown key '" + key + "'");
    }
}

double number(const json& j, const std::string& key, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + ": '" + key + "' must be a number");
    return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& what) {
    if (!j.is_array()) throw ConfigError(what + ": '" + key + "' must be an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(number(e, key, what));
    return out;
}

}  // namespace

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

CoefficientTable parse_table(const json& j, double x_begin, double x_end) {
    if (j.is_number()) return CoefficientTable::constant(j.get<double>(), x_begin, x_end);
    reject_unknown(j, {"nodes", "values"}, "coefficient table");
    if (!j.contains("nodes") || !j.contains("values")) {
        throw ConfigError("coefficient table needs 'nodes' and 'values'");
    }
    return CoefficientTable(numbers(j["nodes"], "nodes", "coefficient table"),
                            numbers(j["values"], "values", "coefficient table"));
}

ContinuousModelSpec parse_continuous_spec(const json& j) {
    const std::string what = "model";
    reject_unknown(j, {"x_begin", "x_star", "k", "mu", "epsilon", "v_max", "a", "p", "g", "alpha",
                       "boundary"},
                   what);
    ContinuousModelSpec spec;
    auto num = [&](const char* key, double& dst) {
        if (j.contains(key)) dst = number(j[key], key, what);
    };
    num("x_begin", spec.x_begin);
    num("x_star", spec.x_star);
    num("k", spec.k);
    num("mu", spec.mu);
    num("epsilon", spec.epsilon);
    num("v_max", spec.v_max);
    if (j.contains("a")) spec.a = parse_table(j["a"], spec.x_begin, spec.x_star);
    if (j.contains("p")) spec.p = parse_table(j["p"], spec.x_begin, spec.x_star);
    else spec.p = CoefficientTable::constant(1.0, spec.x_begin, spec.x_star);

    if (j.contains("g")) {
        const json& g = j["g"];
        if (g.is_string()) {
            if (g.get<std::string>() != "true_data") {
                throw ConfigError("model: g must be \"true_data\", a number or a table");
            }
            spec.maturation = TrueDataMaturation{};
        } else if (g.is_number()) {
            spec.maturation = TabulatedMaturation::constant(g.get<double>(), spec.x_begin, spec.x_star);
        } else {
            reject_unknown(g, {"x_nodes", "v_nodes", "values"}, "model.g");
            if (!g.contains("x_nodes") || !g.contains("v_nodes") || !g.contains("values")) {
                throw ConfigError("model.g needs 'x_nodes', 'v_nodes' and 'values'");
            }
            spec.maturation = TabulatedMaturation{numbers(g["x_nodes"], "x_nodes", "model.g"),
                                                  numbers(g["v_nodes"], "v_nodes", "model.g"),
                                                  numbers(g["values"], "values", "model.g")};
        }
    }
    if (j.contains("alpha")) {
        const json& al = j["alpha"];
        reject_unknown(al, {"a_w", "p_w"}, "model.alpha");
        if (!al.contains("a_w") || !al.contains("p_w")) {
            throw ConfigError("model.alpha needs 'a_w' and 'p_w'");
        }
        spec.alpha = FeedbackLaw::true_data(number(al["a_w"], "a_w", "model.alpha"),
                                            number(al["p_w"], "p_w", "model.alpha"), spec.k);
    }
    if (j.contains("boundary")) {
        const std::string b = j["boundary"].is_string() ? j["boundary"].get<std::string>() : "";
        if (b == "simplified") spec.boundary = BoundaryMode::Simplified;
        else if (b == "general") spec.boundary = BoundaryMode::General;
        else throw ConfigError("model.boundary must be \"simplified\" or \"general\"");
    }
    return spec;
}

DiscreteModelParams parse_discrete(const json& j) {
    const std::string what = "discrete model";
    reject_unknown(j, {"a", "p", "d", "k", "note"}, what);
    for (const char* key : {"a", "p", "d", "k"}) {
        if (!j.contains(key)) throw ConfigError(what + ": missing '" + key + "'");
    }
    return DiscreteModelParams(numbers(j["a"], "a", what), numbers(j["p"], "p", what),
                               numbers(j["d"], "d", what), number(j["k"], "k", what));
}

std::filesystem::path preset_path(const std::string& name) {
    std::filesystem::path dir = CELLDIFF_PRESET_DIR;
    if (const char* env = std::getenv("CELLDIFF_PRESETS"); env && *env) dir = env;
    const std::filesystem::path p =
        std::filesystem::path(name).is_absolute() ? std::filesystem::path(name) : dir / name;
    if (!std::filesystem::exists(p)) throw ConfigError("preset file not found: " + p.string());
    return p;
}

DiscreteModelParams load_table1() { return parse_discrete(load_json(preset_path("table1.json"))); }

ScenarioConfig parse_scenario_config(const json& j) {
    reject_unknown(j, {"scenario", "params", "outputs"}, "scenario config");
    ScenarioConfig cfg;
    if (j.contains("scenario")) {
        if (!j["scenario"].is_string()) throw ConfigError("scenario config: 'scenario' must be a string");
        cfg.scenario = j["scenario"].get<std::string>();
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw ConfigError("scenario config: 'params' must be an object");
        cfg.params = j["params"];
    }
    if (j.contains("outputs")) {
        const json& o = j["outputs"];
        reject_unknown(o, {"dir", "plots"}, "scenario config outputs");
        if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
        if (o.contains("plots")) cfg.plots = o["plots"].get<bool>();
    }
    return cfg;
}

}  // namespace celldiff
