#include "spinsemi/commands.hpp"
#include <algorithm>

#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <fstream>
#include <json.hpp>

#include "spinsemi/classical.hpp"
#include "spinsemi/quantum.hpp"

namespace spinsemi::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt15(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string fmt_tau(cplx tau) {
    char buf[64];
    if (tau.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.6g", tau.real());
    } else if (tau.real() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.6gi", tau.imag());
    } else {
        std::snprintf(buf, sizeof buf, "%.6g%+.6gi", tau.real(), tau.imag());
    }
    return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // fixed newlines on every platform
    if (!out) throw NumericError("cannot write output file: " + path.string());
    return out;
}

std::filesystem::path prepare_dir(const RunConfig& config) {
    const std::filesystem::path dir(config.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw NumericError("cannot create output directory: " + dir.string());
    return dir;
}

ordered_json complex_json(cplx z) { return ordered_json{{"re", z.real()}, {"im", z.imag()}}; }

saddle::SweepOptions sweep_options(const RunConfig& config) {
    saddle::SweepOptions options;
    options.grid.n_radial = config.grid_resolution;
    options.grid.n_angular = config.grid_resolution;
    options.real_only = config.seed_policy == SeedPolicy::RealOnly;
    return options;
}

} // namespace

std::string cmd_quantum(const RunConfig& config) {
    config.validate();
    const std::filesystem::path dir = prepare_dir(config);
    const std::vector<double> grid = config.tau_grid();
    const quantum::EntropySeries series = quantum::exact_entropy_series(config.params, grid);

    const std::filesystem::path path = dir / "quantum_entropy.csv";
    std::ofstream out = open_output(path);
    out << "tau,S_exact\n";
    for (size_t i = 0; i < grid.size(); ++i)
        out << fmt15(series.tau[i]) << ',' << fmt15(series.exact[i]) << '\n';
    return path.string();
}

std::string cmd_semiclassical(const RunConfig& config) {
    config.validate();
    const std::filesystem::path dir = prepare_dir(config);
    const std::vector<double> grid = config.tau_grid();

    const quantum::EntropySeries exact = quantum::exact_entropy_series(config.params, grid);
    const saddle::RootRegistry registry =
        saddle::sweep_roots(config.params, grid, sweep_options(config));
    std::vector<entropy::BranchSeries> breakdown;
    const quantum::EntropySeries semi =
        entropy::semiclassical_entropy(config.params, grid, registry, config.filters, &breakdown);

    const std::filesystem::path path = dir / "semiclassical_entropy.csv";
    std::ofstream out = open_output(path);
    out << "tau,S_sc,S_exact,nSetsActive\n";
    for (size_t i = 0; i < grid.size(); ++i)
        out << fmt15(grid[i]) << ',' << fmt15(semi.semiclassical[i]) << ',' << fmt15(exact.exact[i])
            << ',' << semi.sets_active[i] << '\n';

    ordered_json doc;
    doc["branches"] = ordered_json::array();
    for (const entropy::BranchSeries& branch : breakdown) {
        // keep branches that contributed somewhere; the swarm of sets whose
        // value never leaves the negligible floor is summarized by nSetsActive
        const bool ever_active = std::any_of(branch.filtered_reason.begin(),
                                             branch.filtered_reason.end(),
                                             [](const std::string& r) { return r.empty(); });
        if (!ever_active) continue;
        ordered_json rec;
        rec["branchId"] = branch.branch_id;
        rec["tau"] = branch.tau;
        rec["x1A"] = ordered_json::array();
        for (const cplx& x : branch.x1A) rec["x1A"].push_back(complex_json(x));
        std::vector<double> v_re, v_im;
        v_re.reserve(branch.value.size());
        v_im.reserve(branch.value.size());
        for (const cplx& v : branch.value) {
            v_re.push_back(v.real());
            v_im.push_back(v.imag());
        }
        rec["value_re"] = v_re;
        rec["value_im"] = v_im;
        rec["filteredReason"] = branch.filtered_reason;
        doc["branches"].push_back(std::move(rec));
    }
    std::ofstream json_out = open_output(dir / "branches.json");
    json_out << doc.dump(2) << '\n';

    return path.string();
}

std::string cmd_rootmap(const RunConfig& config, cplx tau) {
    config.validate();
    const std::filesystem::path dir = prepare_dir(config);
    const cplx T = config.params.tau_to_time(tau);

    saddle::AnnulusGrid grid;
    grid.n_radial = config.grid_resolution;
    grid.n_angular = config.grid_resolution;

    const std::filesystem::path path = dir / ("rootmap_" + fmt_tau(tau) + ".csv");
    std::ofstream out = open_output(path);
    out << "# grid\n";
    out << "re_x,im_x,re_f,im_f\n";
    const double log_rmin = std::log(grid.r_min);
    const double log_rmax = std::log(grid.r_max);
    for (int i = 0; i <= grid.n_radial; ++i) {
        const double r = std::exp(log_rmin + (log_rmax - log_rmin) * i / grid.n_radial);
        for (int k = 0; k <= grid.n_angular; ++k) {
            const double theta = std::numbers::pi * k / grid.n_angular;
            const cplx x = std::polar(r, theta);
            cplx f;
            try {
                f = saddle::transcendental_residual(x, config.params, T);
            } catch (const SingularityError&) {
                f = cplx{std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN()};
            }
            out << fmt15(x.real()) << ',' << fmt15(x.imag()) << ',' << fmt15(f.real()) << ','
                << fmt15(f.imag()) << '\n';
        }
    }
    out << "# roots\n";
    out << "re,im,converged,filtered\n";
    for (const saddle::RootRecord& rec : saddle::scan_roots(config.params, tau, grid))
        out << fmt15(rec.x1A.real()) << ',' << fmt15(rec.x1A.imag()) << ",1,"
            << (rec.filtered ? 1 : 0) << '\n';
    return path.string();
}

std::string cmd_diagnostics(const RunConfig& config) {
    config.validate();
    const std::filesystem::path dir = prepare_dir(config);
    const std::vector<double> grid = config.tau_grid();

    const classical::PhasePoint real_point{config.params.s0A, config.params.s0B,
                                           std::conj(config.params.s0A),
                                           std::conj(config.params.s0B)};

    ordered_json doc;
    doc["tau"] = grid;
    doc["detM"] = ordered_json::array();
    doc["detMstar"] = ordered_json::array();
    for (const double tau : grid) {
        const cplx T = config.params.tau_to_time(tau);
        doc["detM"].push_back(complex_json(classical::det_M(real_point, config.params, T)));
        doc["detMstar"].push_back(complex_json(classical::det_M_star(real_point, config.params, T)));
    }
    doc["tauC"] =
        complex_json(classical::critical_time(config.params) / config.params.revival_period());

    // residuals of the action-derivative identities on the real trajectory,
    // sampled across the run's tau window
    double max_first = 0.0, max_stom = 0.0;
    for (int i = 1; i <= 4; ++i) {
        const double tau = grid.front() + (grid.back() - grid.front()) * i / 5.0;
        if (tau == 0.0) continue;
        const cplx T = config.params.tau_to_time(tau);
        const classical::AnalyticTrajectory traj =
            classical::make_trajectory(real_point, config.params, T);
        const classical::VariaSReport report = classical::verify_variaS(traj, config.params);
        max_first = std::max(max_first, report.max_first_derivative_residual);
        max_stom = std::max(max_stom, report.max_stom_residual);
    }
    doc["variaS"] = ordered_json{{"maxFirstDerivativeResidual", max_first},
                                 {"maxStomResidual", max_stom}};

    const std::filesystem::path path = dir / "diagnostics.json";
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    return path.string();
}

} // namespace spinsemi::cli
