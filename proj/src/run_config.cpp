#include "spinsemi/run_config.hpp"

#include <fstream>
#include <json.hpp>

namespace spinsemi::cli {

void RunConfig::validate() const {
    params.validate();
    if (!(tau_min < tau_max)) throw ConfigError("tauMin must be less than tauMax");
    if (tau_steps < 2) throw ConfigError("tauSteps must be at least 2");
    if (grid_resolution < 2) throw ConfigError("gridResolution must be at least 2");
    if (filters.max_abs <= 0.0 || filters.max_growth_rate <= 0.0 || filters.growth_floor <= 0.0 ||
        filters.min_det_F <= 0.0 || filters.negligible_abs <= 0.0)
        throw ConfigError("filter thresholds must be positive");
}

std::vector<double> RunConfig::tau_grid() const {
    std::vector<double> grid(tau_steps);
    for (int i = 0; i < tau_steps; ++i)
        grid[i] = tau_min + (tau_max - tau_min) * i / (tau_steps - 1);
    return grid;
}

RunConfig default_config() { return RunConfig{}; }

namespace {

cplx parse_complex(const nlohmann::json& node, const char* key) {
    if (!node.contains("re") || !node.contains("im"))
        throw ConfigError(std::string(key) + " must be an object {\"re\":..., \"im\":...}");
    return cplx{node.at("re").get<double>(), node.at("im").get<double>()};
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    RunConfig config = default_config();
    try {
        if (doc.contains("j")) config.params.j = doc.at("j").get<double>();
        if (doc.contains("s0A")) config.params.s0A = parse_complex(doc.at("s0A"), "s0A");
        if (doc.contains("s0B")) config.params.s0B = parse_complex(doc.at("s0B"), "s0B");
        if (doc.contains("lambda")) config.params.lambda = doc.at("lambda").get<double>();
        if (doc.contains("tauMin")) config.tau_min = doc.at("tauMin").get<double>();
        if (doc.contains("tauMax")) config.tau_max = doc.at("tauMax").get<double>();
        if (doc.contains("tauSteps")) config.tau_steps = doc.at("tauSteps").get<int>();
        if (doc.contains("gridResolution")) config.grid_resolution = doc.at("gridResolution").get<int>();
        if (doc.contains("filters")) {
            const auto& f = doc.at("filters");
            if (f.contains("maxAbs")) config.filters.max_abs = f.at("maxAbs").get<double>();
            if (f.contains("maxGrowthRate"))
                config.filters.max_growth_rate = f.at("maxGrowthRate").get<double>();
            if (f.contains("growthFloor")) config.filters.growth_floor = f.at("growthFloor").get<double>();
            if (f.contains("minDetF")) config.filters.min_det_F = f.at("minDetF").get<double>();
            if (f.contains("negligibleAbs"))
                config.filters.negligible_abs = f.at("negligibleAbs").get<double>();
        }
        if (doc.contains("outputDir")) config.output_dir = doc.at("outputDir").get<std::string>();
        if (doc.contains("seedPolicy")) {
            const std::string policy = doc.at("seedPolicy").get<std::string>();
            if (policy == "real-only")
                config.seed_policy = SeedPolicy::RealOnly;
            else if (policy == "scan+continue")
                config.seed_policy = SeedPolicy::ScanContinue;
            else
                throw ConfigError("seedPolicy must be 'real-only' or 'scan+continue'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    config.validate();
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

} // namespace spinsemi::cli
