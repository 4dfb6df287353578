// Command-line front end: exact and semiclassical entanglement dynamics of
// two coupled spins, root maps of the trajectory-set equation, and stability
// diagnostics, emitted as deterministic CSV/JSON datasets.

#include <CLI11.hpp>
#include <complex>
#include <iostream>
#include <json.hpp>

#include "spinsemi/commands.hpp"

namespace {

using spinsemi::cplx;
using namespace spinsemi::cli;

// accepts "0.5", "0.5i", "0.1+0.2i", "i", "-i"
cplx parse_tau(const std::string& text) {
    std::string s = text;
    if (s.empty()) throw spinsemi::ConfigError("empty tau");
    const bool imaginary = s.back() == 'i' || s.back() == 'I';
    if (!imaginary) return cplx{std::stod(s), 0.0};
    s.pop_back();
    // split a trailing signed imaginary part from an optional real part
    size_t split = s.find_last_of("+-");
    if (split == std::string::npos || split == 0) {
        const std::string im = s.empty() || s == "+" || s == "-" ? s + "1" : s;
        return cplx{0.0, std::stod(im)};
    }
    // exponent signs ("1e-3i") are not split points
    if (s[split - 1] == 'e' || s[split - 1] == 'E') {
        const size_t prev = s.find_last_of("+-", split - 2);
        if (prev == std::string::npos || prev == 0) return cplx{0.0, std::stod(s)};
        split = prev;
    }
    std::string im_part = s.substr(split);
    if (im_part == "+" || im_part == "-") im_part += "1";
    return cplx{std::stod(s.substr(0, split)), std::stod(im_part)};
}

int report_error(int code, const std::string& kind, const std::string& message) {
    nlohmann::ordered_json doc{{"error", kind}, {"message", message}, {"exitCode", code}};
    std::cerr << doc.dump(2) << std::endl;
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-spin entanglement dynamics: exact and semiclassical engines"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path;
    std::string out_dir;
    std::string policy;
    std::string tau_text = "0.5";

    app.add_option("--config", config_path, "JSON config file")->capture_default_str();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--policy", policy, "seed policy: real-only | full")
        ->check(CLI::IsMember({"real-only", "full"}));

    CLI::App* quantum = app.add_subcommand("quantum", "exact entropy curve");
    CLI::App* semicl = app.add_subcommand("semiclassical", "semiclassical entropy curve");
    CLI::App* rootmap = app.add_subcommand("rootmap", "residual map and roots at one tau");
    rootmap->add_option("--tau", tau_text, "dimensionless time, e.g. 0.5 or 0.035368i")
        ->capture_default_str();
    CLI::App* diagnostics = app.add_subcommand("diagnostics", "stability diagnostics");

    CLI11_PARSE(app, argc, argv);

    RunConfig config;
    try {
        config = config_path.empty() ? default_config() : load_config(config_path);
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (policy == "real-only") config.seed_policy = SeedPolicy::RealOnly;
        if (policy == "full") config.seed_policy = SeedPolicy::ScanContinue;
        config.validate();
    } catch (const spinsemi::ConfigError& e) {
        return report_error(2, "config", e.what());
    }

    try {
        std::string path;
        if (quantum->parsed()) path = cmd_quantum(config);
        if (semicl->parsed()) path = cmd_semiclassical(config);
        if (rootmap->parsed()) path = cmd_rootmap(config, parse_tau(tau_text));
        if (diagnostics->parsed()) path = cmd_diagnostics(config);
        std::cout << path << std::endl;
    } catch (const spinsemi::ConfigError& e) {
        return report_error(2, "config", e.what());
    } catch (const std::exception& e) {
        return report_error(3, "numerical", e.what());
    }
    return 0;
}
