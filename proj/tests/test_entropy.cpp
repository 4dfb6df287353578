#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinsemi/entropy.hpp"
#include "spinsemi/quantum.hpp"

using namespace spinsemi::entropy;
using spinsemi::cplx;
using spinsemi::QuantumParams;
using spinsemi::linalg::BranchTracker;
using spinsemi::linalg::ComplexMatrix;

namespace {

const QuantumParams kShippedParams{4.5, cplx{1.0, 0.0}, cplx{1.0, 0.0}, 1.0, 1.0};

// a complex root of the trajectory-set equation away from the boundaries
cplx pick_complex_root(double tau) {
    spinsemi::saddle::AnnulusGrid grid;
    grid.n_radial = 300;
    grid.n_angular = 300;
    for (const auto& rec : spinsemi::saddle::scan_roots(kShippedParams, tau, grid))
        if (rec.origin == spinsemi::saddle::RootOrigin::GridScan && rec.x1A.real() > 0.1 &&
            std::abs(rec.x1A) < 0.95 && std::abs(rec.x1A.imag()) > 1e-3)
            return rec.x1A;
    return cplx{0.0, 0.0};
}

} // namespace

TEST_CASE("build_F_matrix: selector pattern with unit determinant at T=0") {
    const auto set = spinsemi::saddle::assemble_set(cplx{1.0, 0.0}, kShippedParams, 0.0);
    const ComplexMatrix F = build_F_matrix(set, kShippedParams);

    // at T=0 the stability blocks are trivial and F reduces to a selector
    // permutation with det = 1 (checked against the cofactor oracle as well)
    const cplx d = spinsemi::linalg::det(F);
    CHECK(std::abs(d - 1.0) < 1e-12);
    CHECK(std::abs(oracles::cofactor_det(F) - 1.0) < 1e-12);

    int nonzero = 0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (std::abs(F(i, j)) > 1e-14) {
                CHECK(std::abs(F(i, j) - 1.0) < 1e-14);  // only unit entries survive
                ++nonzero;
            }
    CHECK(nonzero == 8);
}

TEST_CASE("build_F_matrix: det F is continuous and near 1 at small T") {
    double prev = 1.0;
    for (const double tau : {1e-4, 2e-4, 5e-4, 1e-3, 2e-3}) {
        const cplx T = kShippedParams.tau_to_time(tau);
        const auto set = spinsemi::saddle::assemble_set(cplx{1.0, 0.0}, kShippedParams, T);
        const cplx d = spinsemi::linalg::det(build_F_matrix(set, kShippedParams));
        CHECK(std::abs(d.imag()) < 1e-10);
        CHECK(d.real() > prev - 1e-12);  // grows monotonically from 1 here
        CHECK(std::abs(d - 1.0) < 10.0 * (2.0 * std::numbers::pi * tau) *
                                      (2.0 * std::numbers::pi * tau) * 20.25 + 1e-10);
        prev = d.real();
    }
}

TEST_CASE("contribution: real set approaches purity 1 as tau -> 0") {
    BranchTracker tracker;
    const cplx T0 = kShippedParams.tau_to_time(1e-4);
    const auto set = spinsemi::saddle::assemble_set(cplx{1.0, 0.0}, kShippedParams, T0);
    const SetContribution c = contribution(set, kShippedParams, tracker);
    CHECK(std::abs(c.value - 1.0) < 1e-4);
    CHECK(std::abs(c.Afactor - 1.0) < 1e-12);
    CHECK(std::abs(c.phase) < 1e-12);
}

TEST_CASE("contribution: real set reproduces the short-time quantum curve") {
    // the real-trajectory-only entropy follows the exact one at early times
    // and departs later; the quantum module is the oracle
    BranchTracker tracker;
    for (const double tau : {0.01, 0.03, 0.05}) {
        const cplx T = kShippedParams.tau_to_time(tau);
        const auto set = spinsemi::saddle::assemble_set(cplx{1.0, 0.0}, kShippedParams, T);
        const SetContribution c = contribution(set, kShippedParams, tracker);
        const double s_real = 1.0 - c.value.real();
        const double s_exact =
            1.0 - spinsemi::quantum::closed_form_purity(kShippedParams, T.real());
        CHECK(std::abs(c.value.imag()) < 1e-12);
        CHECK(std::abs(s_real - s_exact) < 0.02);
    }
    const cplx T = kShippedParams.tau_to_time(0.3);
    const auto set = spinsemi::saddle::assemble_set(cplx{1.0, 0.0}, kShippedParams, T);
    const SetContribution c = contribution(set, kShippedParams, tracker);
    const double s_exact = 1.0 - spinsemi::quantum::closed_form_purity(kShippedParams, T.real());
    CHECK(std::abs((1.0 - c.value.real()) - s_exact) > 0.1);
}

TEST_CASE("contribution: symmetry images pair to conjugate and equal values") {
    const double tau = 0.42;
    const cplx T = kShippedParams.tau_to_time(tau);
    const cplx root = pick_complex_root(tau);
    REQUIRE(root != cplx{0.0, 0.0});

    auto value_of = [&](cplx x) {
        BranchTracker tracker;
        return contribution(spinsemi::saddle::assemble_set(x, kShippedParams, T), kShippedParams,
                            tracker)
            .value;
    };
    const cplx v = value_of(root);
    const cplx v_conj = value_of(std::conj(root));
    const cplx v_inv = value_of(1.0 / root);
    const cplx v_inv_conj = value_of(1.0 / std::conj(root));

    // principal anchoring is conjugate-symmetric away from the cut, so the
    // pairing is exact here: conjugate roots give conjugate values and the
    // inverse root relabels the trajectories without changing the value
    CHECK(std::abs(v_conj - std::conj(v)) < 1e-10 * std::max(1.0, std::abs(v)));
    CHECK(std::abs(v_inv - v) < 1e-10 * std::max(1.0, std::abs(v)));
    CHECK(std::abs(v_inv_conj - std::conj(v)) < 1e-10 * std::max(1.0, std::abs(v)));
    // hence the symmetry-family sum is real
    CHECK(std::abs((v + v_conj + v_inv + v_inv_conj).imag()) < 1e-10);
}

TEST_CASE("contribution: the squared value equals A/detF times the squared phase factor") {
    const double tau = 0.27;
    const cplx T = kShippedParams.tau_to_time(tau);
    const cplx root = pick_complex_root(tau);
    REQUIRE(root != cplx{0.0, 0.0});
    BranchTracker tracker;
    const SetContribution c =
        contribution(spinsemi::saddle::assemble_set(root, kShippedParams, T), kShippedParams, tracker);
    const cplx lhs = c.value * c.value;
    const cplx rhs = c.Afactor / c.Fdet * std::exp(2.0 * c.phase);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("purity_q_matrix: agrees with the stability-block route") {
    // real set at small and moderate tau
    for (const double tau : {0.05, 0.3}) {
        const cplx T = kShippedParams.tau_to_time(tau);
        const auto set = spinsemi::saddle::assemble_set(cplx{1.0, 0.0}, kShippedParams, T);
        BranchTracker tracker;
        const SetContribution c = contribution(set, kShippedParams, tracker);
        const cplx q = purity_q_matrix(set, kShippedParams);
        const double rel =
            std::min(std::abs(q - c.value), std::abs(q + c.value)) / std::abs(c.value);
        CHECK(rel < 1e-6);
    }
    // complex sets
    for (const double tau : {0.3, 0.5}) {
        const cplx T = kShippedParams.tau_to_time(tau);
        const cplx root = pick_complex_root(tau);
        REQUIRE(root != cplx{0.0, 0.0});
        const auto set = spinsemi::saddle::assemble_set(root, kShippedParams, T);
        BranchTracker tracker;
        const SetContribution c = contribution(set, kShippedParams, tracker);
        const cplx q = purity_q_matrix(set, kShippedParams);
        const double rel =
            std::min(std::abs(q - c.value), std::abs(q + c.value)) / std::abs(c.value);
        CHECK(rel < 1e-6);
    }
    // the real set at vanishing time is pure
    const auto set = spinsemi::saddle::assemble_set(cplx{1.0, 0.0}, kShippedParams,
                                                    kShippedParams.tau_to_time(1e-5));
    CHECK(std::abs(purity_q_matrix(set, kShippedParams) - 1.0) < 1e-4);
}

TEST_CASE("semiclassical_entropy: vanishes at tau -> 0 and stays real") {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(1e-4 + (0.2 - 1e-4) * i / 40.0);

    spinsemi::saddle::SweepOptions options;
    options.grid.n_radial = 300;
    options.grid.n_angular = 300;
    const auto registry = spinsemi::saddle::sweep_roots(kShippedParams, grid, options);
    std::vector<BranchSeries> breakdown;
    const auto series =
        semiclassical_entropy(kShippedParams, grid, registry, FilterPolicy{}, &breakdown);

    CHECK(std::abs(series.semiclassical.front()) < 1e-4);
    CHECK_FALSE(breakdown.empty());

    // every reported branch value on the grid is real after image pairing
    for (const BranchSeries& branch : breakdown)
        for (const cplx& v : branch.value) CHECK(std::abs(v.imag()) < 1e-6);
}

TEST_CASE("semiclassical_entropy: bookkeeping is exact for the included sets") {
    // adding up the per-branch breakdown reproduces 1 - S_sc to round-off
    std::vector<double> grid{0.1, 0.15, 0.2, 0.25};
    spinsemi::saddle::SweepOptions options;
    options.grid.n_radial = 300;
    options.grid.n_angular = 300;
    const auto registry = spinsemi::saddle::sweep_roots(kShippedParams, grid, options);
    std::vector<BranchSeries> breakdown;
    const auto series =
        semiclassical_entropy(kShippedParams, grid, registry, FilterPolicy{}, &breakdown);

    for (size_t i = 0; i < grid.size(); ++i) {
        cplx total{0.0, 0.0};
        for (const BranchSeries& branch : breakdown)
            for (size_t k = 0; k < branch.tau.size(); ++k)
                if (branch.tau[k] == grid[i] && branch.filtered_reason[k].empty())
                    total += branch.value[k];
        CHECK(std::abs((1.0 - total.real()) - series.semiclassical[i]) < 1e-12);
    }
}

TEST_CASE("semiclassical_entropy: real-only policy holds only at early times") {
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(1e-3 + (0.3 - 1e-3) * i / 60.0);
    spinsemi::saddle::SweepOptions options;
    options.real_only = true;
    const auto registry = spinsemi::saddle::sweep_roots(kShippedParams, grid, options);
    const auto series = semiclassical_entropy(kShippedParams, grid, registry, FilterPolicy{});
    const auto exact = spinsemi::quantum::exact_entropy_series(kShippedParams, grid);

    for (size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= 0.05)
            CHECK(std::abs(series.semiclassical[i] - exact.exact[i]) < 0.02);
    }
    CHECK(std::abs(series.semiclassical.back() - exact.exact.back()) > 0.1);
    // the real set is never filtered at the shipped parameters
    for (const int n : series.sets_active) CHECK(n == 1);
}
