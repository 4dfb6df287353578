#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "spinsemi/commands.hpp"

using namespace spinsemi::cli;
using spinsemi::cplx;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

RunConfig small_config(const std::string& dir) {
    RunConfig config = default_config();
    config.tau_steps = 21;
    config.tau_min = 0.0;
    config.tau_max = 0.2;
    config.grid_resolution = 200;
    config.output_dir = dir;
    return config;
}

} // namespace

TEST_CASE("config: parsing, defaults and validation") {
    const RunConfig config = parse_config(R"({
        "j": 2.5,
        "s0A": {"re": 0.5, "im": -0.25},
        "lambda": 2.0,
        "tauMin": 0.1, "tauMax": 0.6, "tauSteps": 11,
        "gridResolution": 150,
        "filters": {"maxAbs": 2.0},
        "seedPolicy": "real-only"
    })");
    CHECK(config.params.j == 2.5);
    CHECK(config.params.s0A == cplx{0.5, -0.25});
    CHECK(config.params.s0B == cplx{1.0, 0.0});  // default untouched
    CHECK(config.params.lambda == 2.0);
    CHECK(config.tau_steps == 11);
    CHECK(config.filters.max_abs == 2.0);
    CHECK(config.filters.min_det_F == 1e-8);  // default untouched
    CHECK(config.seed_policy == SeedPolicy::RealOnly);

    const std::vector<double> grid = config.tau_grid();
    REQUIRE(grid.size() == 11);
    CHECK(grid.front() == doctest::Approx(0.1));
    CHECK(grid.back() == doctest::Approx(0.6));

    CHECK_THROWS_AS(parse_config("not json"), spinsemi::ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"tauSteps": 1})"), spinsemi::ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"tauMin": 0.5, "tauMax": 0.1})"), spinsemi::ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"j": 0.7})"), spinsemi::ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"seedPolicy": "everything"})"), spinsemi::ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"s0A": 1.0})"), spinsemi::ConfigError);
}

TEST_CASE("cmd_quantum: boundary rows and reparse round trip") {
    const std::string dir = "test_out_quantum";
    RunConfig config = default_config();
    config.tau_steps = 101;
    config.output_dir = dir;
    const std::string path = cmd_quantum(config);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "tau,S_exact");

    std::vector<double> tau, s;
    std::string line;
    while (std::getline(in, line)) {
        const size_t comma = line.find(',');
        tau.push_back(std::stod(line.substr(0, comma)));
        s.push_back(std::stod(line.substr(comma + 1)));
    }
    REQUIRE(tau.size() == 101);
    CHECK(std::abs(s.front()) < 1e-12);          // S(0) = 0
    CHECK(std::abs(s.back()) < 1e-10);           // S(1) = 0 (revival)
    CHECK(std::abs(tau.back() - 1.0) < 1e-15);

    // reparse: values reproduce the library at printed precision
    const auto series = spinsemi::quantum::exact_entropy_series(config.params, tau);
    for (size_t i = 0; i < tau.size(); ++i)
        CHECK(std::abs(series.exact[i] - s[i]) < 1e-12);

    std::filesystem::remove_all(dir);
}

TEST_CASE("cmd_semiclassical: files, columns, determinism") {
    const std::string dir = "test_out_semi";
    const RunConfig config = small_config(dir);

    const std::string path = cmd_semiclassical(config);
    const std::string csv_first = slurp(path);
    const std::string json_first = slurp(std::filesystem::path(dir) / "branches.json");

    // byte-identical on a second run
    cmd_semiclassical(config);
    CHECK(slurp(path) == csv_first);
    CHECK(slurp(std::filesystem::path(dir) / "branches.json") == json_first);

    std::istringstream in(csv_first);
    std::string header;
    std::getline(in, header);
    CHECK(header == "tau,S_sc,S_exact,nSetsActive");
    int rows = 0;
    std::string line;
    double first_s_sc = -1.0;
    while (std::getline(in, line)) {
        if (rows == 0) {
            // tau=0 row: S_sc = 0 and one active set (the real one)
            std::istringstream fields(line);
            std::string tau_s, ssc_s;
            std::getline(fields, tau_s, ',');
            std::getline(fields, ssc_s, ',');
            first_s_sc = std::stod(ssc_s);
        }
        ++rows;
    }
    CHECK(rows == config.tau_steps);
    CHECK(std::abs(first_s_sc) < 1e-6);

    const nlohmann::json doc = nlohmann::json::parse(json_first);
    REQUIRE(doc.contains("branches"));
    REQUIRE(!doc["branches"].empty());
    for (const auto& rec : doc["branches"]) {
        CHECK(rec.contains("branchId"));
        CHECK(rec["tau"].size() == rec["x1A"].size());
        CHECK(rec["tau"].size() == rec["value_re"].size());
        CHECK(rec["tau"].size() == rec["value_im"].size());
        CHECK(rec["tau"].size() == rec["filteredReason"].size());
    }

    std::filesystem::remove_all(dir);
}

TEST_CASE("cmd_semiclassical: real-only policy reproduces the real-set curve") {
    const std::string dir = "test_out_semi_real";
    RunConfig config = small_config(dir);
    config.seed_policy = SeedPolicy::RealOnly;
    const std::string path = cmd_semiclassical(config);

    std::istringstream in(slurp(path));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string tau_s, ssc_s, sex_s, n_s;
        std::getline(fields, tau_s, ',');
        std::getline(fields, ssc_s, ',');
        std::getline(fields, sex_s, ',');
        std::getline(fields, n_s, ',');
        CHECK(std::stoi(n_s) == 1);
        if (std::stod(tau_s) <= 0.05)
            CHECK(std::abs(std::stod(ssc_s) - std::stod(sex_s)) < 0.02);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("cmd_rootmap: grid plus roots sections") {
    const std::string dir = "test_out_rootmap";
    RunConfig config = default_config();
    config.grid_resolution = 120;
    config.output_dir = dir;

    const std::string path = cmd_rootmap(config, cplx{0.01, 0.0});
    CHECK(path.find("rootmap_0.01.csv") != std::string::npos);

    std::istringstream in(slurp(path));
    std::string line;
    std::getline(in, line);
    CHECK(line == "# grid");
    std::getline(in, line);
    CHECK(line == "re_x,im_x,re_f,im_f");
    int grid_rows = 0;
    bool roots_section = false;
    std::vector<std::string> root_lines;
    while (std::getline(in, line)) {
        if (line == "# roots") {
            roots_section = true;
            std::getline(in, line);  // column header
            CHECK(line == "re,im,converged,filtered");
            continue;
        }
        if (!roots_section)
            ++grid_rows;
        else
            root_lines.push_back(line);
    }
    CHECK(grid_rows == 121 * 121);
    CHECK(!root_lines.empty());
    // x = 1 appears among the roots
    bool has_one = false;
    for (const std::string& r : root_lines)
        if (r.rfind("1,0,1,0", 0) == 0) has_one = true;
    CHECK(has_one);

    // complex tau is accepted and named accordingly
    const std::string complex_path = cmd_rootmap(config, cplx{0.0, 0.0353678});
    CHECK(complex_path.find("rootmap_0.0353678i.csv") != std::string::npos);

    std::filesystem::remove_all(dir);
}

TEST_CASE("cmd_diagnostics: closed forms on the emitted grid") {
    const std::string dir = "test_out_diag";
    RunConfig config = default_config();
    config.tau_steps = 26;
    config.output_dir = dir;
    const std::string path = cmd_diagnostics(config);

    const nlohmann::json doc = nlohmann::json::parse(slurp(path));
    REQUIRE(doc.contains("tau"));
    REQUIRE(doc.contains("detM"));
    REQUIRE(doc.contains("detMstar"));
    const auto& tau = doc["tau"];
    REQUIRE(tau.size() == 26);

    // det M = 1 for the conserved-product flow; det M* = 1 + 20.25 (2 pi tau)^2
    for (size_t i = 0; i < tau.size(); ++i) {
        const double t = tau[i].get<double>();
        const double expected = 1.0 + 20.25 * std::pow(2.0 * std::numbers::pi * t, 2.0);
        CHECK(std::abs(doc["detM"][i]["re"].get<double>() - 1.0) < 1e-9);
        CHECK(std::abs(doc["detM"][i]["im"].get<double>()) < 1e-9);
        CHECK(std::abs(doc["detMstar"][i]["re"].get<double>() - expected) < 1e-9 * expected);
    }
    CHECK(std::abs(doc["detMstar"][0]["re"].get<double>() - 1.0) < 1e-12);

    // critical time tau_c = i/(2 pi j)
    CHECK(std::abs(doc["tauC"]["re"].get<double>()) < 1e-15);
    CHECK(std::abs(doc["tauC"]["im"].get<double>() - 1.0 / (9.0 * std::numbers::pi)) < 1e-12);

    CHECK(doc["variaS"]["maxFirstDerivativeResidual"].get<double>() < 1e-6);
    CHECK(doc["variaS"]["maxStomResidual"].get<double>() < 1e-6);

    std::filesystem::remove_all(dir);
}
