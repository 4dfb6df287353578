#ifndef SPINSEMI_RUN_CONFIG_HPP
#define SPINSEMI_RUN_CONFIG_HPP

#include <string>
#include <vector>

#include "spinsemi/entropy.hpp"
#include "spinsemi/params.hpp"

namespace spinsemi::cli {

enum class SeedPolicy { RealOnly, ScanContinue };

// Full description of a run. Everything an output file depends on lives here;
// the shipped defaults are j = 4.5, s0A = s0B = lambda = 1.
struct RunConfig {
    QuantumParams params;
    double tau_min = 0.0;
    double tau_max = 1.0;
    int tau_steps = 201;
    int grid_resolution = 600;
    entropy::FilterPolicy filters;
    std::string output_dir = ".";
    SeedPolicy seed_policy = SeedPolicy::ScanContinue;

    void validate() const;
    std::vector<double> tau_grid() const;
};

RunConfig default_config();

// JSON schema (all keys optional, defaults above):
// {
//   "j": 4.5,
//   "s0A": {"re": 1.0, "im": 0.0},
//   "s0B": {"re": 1.0, "im": 0.0},
//   "lambda": 1.0,
//   "tauMin": 0.0, "tauMax": 1.0, "tauSteps": 201,
//   "gridResolution": 600,
//   "filters": {"maxAbs": 1.5, "maxGrowthRate": 10.0, "minDetF": 1e-8},
//   "outputDir": ".",
//   "seedPolicy": "real-only" | "scan+continue"
// }
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

} // namespace spinsemi::cli

#endif
