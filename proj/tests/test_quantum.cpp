#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "spinsemi/quantum.hpp"

using namespace spinsemi::quantum;
using spinsemi::cplx;
using spinsemi::QuantumParams;

namespace {

const QuantumParams kShippedParams{4.5, cplx{1.0, 0.0}, cplx{1.0, 0.0}, 1.0, 1.0};

double inner_product_norm(const std::vector<cplx>& a) {
    double n = 0.0;
    for (const cplx& z : a) n += std::norm(z);
    return n;
}

} // namespace

TEST_CASE("coherent_amplitudes: closed cases") {
    const std::vector<cplx> south = coherent_amplitudes({cplx{0.0, 0.0}, 0.5});
    REQUIRE(south.size() == 2);
    CHECK(std::abs(south[0] - 1.0) < 1e-15);
    CHECK(std::abs(south[1]) < 1e-15);

    const std::vector<cplx> equal = coherent_amplitudes({cplx{1.0, 0.0}, 0.5});
    CHECK(std::abs(equal[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(equal[1] - 1.0 / std::sqrt(2.0)) < 1e-15);

    const std::vector<cplx> nine = coherent_amplitudes({cplx{1.0, 0.0}, 4.5});
    REQUIRE(nine.size() == 10);
    for (int n = 0; n < 10; ++n)
        CHECK(std::abs(nine[n] - std::sqrt(binomial(9, n)) / std::pow(2.0, 4.5)) < 1e-14);
    CHECK(std::abs(inner_product_norm(nine) - 1.0) < 1e-12);
}

TEST_CASE("coherent_amplitudes: normalization and mean spin length") {
    for (const cplx s : {cplx{0.3, -0.7}, cplx{2.0, 1.0}, cplx{0.0, 0.01}}) {
        for (const double j : {0.5, 1.0, 4.5, 12.0}) {
            const std::vector<cplx> a = coherent_amplitudes({s, j});
            CHECK(std::abs(inner_product_norm(a) - 1.0) < 1e-12);

            // |<J>| = j: Jz from populations, J+ from neighboring amplitudes
            double jz = 0.0;
            cplx jplus{0.0, 0.0};
            const int two_j = static_cast<int>(a.size()) - 1;
            for (int n = 0; n <= two_j; ++n) {
                const double m = n - j;
                jz += std::norm(a[n]) * m;
                if (n < two_j)
                    jplus += std::conj(a[n + 1]) * a[n] *
                             std::sqrt(j * (j + 1.0) - m * (m + 1.0));
            }
            const double length =
                std::sqrt(jz * jz + std::norm(jplus));  // |J|^2 = Jz^2 + |<J+>|^2
            CHECK(std::abs(length - j) < 1e-10);
        }
    }
}

TEST_CASE("overlap: closed cases and summation oracle") {
    const CoherentLabel a{cplx{1.0, 0.0}, 4.5};
    CHECK(std::abs(overlap(a, a) - 1.0) < 1e-14);

    for (const double j : {0.5, 1.5, 4.5}) {
        const CoherentLabel plus{cplx{1.0, 0.0}, j};
        const CoherentLabel minus{cplx{-1.0, 0.0}, j};
        CHECK(std::abs(overlap(plus, minus)) < 1e-14);  // antipodal
    }

    const CoherentLabel b{cplx{0.0, 1.0}, 4.5};
    const std::vector<cplx> va = coherent_amplitudes(a);
    const std::vector<cplx> vb = coherent_amplitudes(b);
    cplx direct{0.0, 0.0};
    for (size_t n = 0; n < va.size(); ++n) direct += std::conj(va[n]) * vb[n];
    CHECK(std::abs(overlap(a, b) - direct) < 1e-12);

    CHECK_THROWS_AS(overlap(a, CoherentLabel{cplx{1.0, 0.0}, 2.0}), spinsemi::DimensionError);
}

TEST_CASE("evolve_phase_coupling: identity, recurrence, norm") {
    const TwoSpinState psi0 = product_state(kShippedParams);
    const TwoSpinState same = evolve_phase_coupling(psi0, kShippedParams, 0.0);
    for (size_t i = 0; i < psi0.amp.size(); ++i) CHECK(std::abs(same.amp[i] - psi0.amp[i]) < 1e-15);

    // purity returns to 1 after one revival period
    const double Tr = kShippedParams.revival_period();
    const TwoSpinState revived = evolve_phase_coupling(psi0, kShippedParams, Tr);
    CHECK(std::abs(reduced_purity(revived) - 1.0) < 1e-12);
    CHECK(std::abs(revived.norm() - 1.0) < 1e-12);

    for (const double tau : {0.13, 0.5, 0.77}) {
        const TwoSpinState evolved =
            evolve_phase_coupling(psi0, kShippedParams, kShippedParams.tau_to_time(tau));
        CHECK(std::abs(evolved.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("evolve_phase_coupling: short-time purity series for j = 1/2") {
    const QuantumParams params{0.5, cplx{1.0, 0.0}, cplx{1.0, 0.0}, 1.0, 1.0};
    const TwoSpinState psi0 = product_state(params);

    // series oracle: P = 1 - (lambda T)^2/2 <dA^2><dB^2> + O(T^4), with
    // <d^2> = 2 Var(n) computed from the amplitude populations
    auto delta_sq = [](const std::vector<cplx>& a, double j) {
        double mean = 0.0, mean2 = 0.0;
        for (size_t n = 0; n < a.size(); ++n) {
            mean += std::norm(a[n]) * static_cast<double>(n);
            mean2 += std::norm(a[n]) * static_cast<double>(n) * static_cast<double>(n);
        }
        (void)j;
        return 2.0 * (mean2 - mean * mean);
    };
    const double dA2 = delta_sq(coherent_amplitudes({params.s0A, params.j}), params.j);
    const double dB2 = delta_sq(coherent_amplitudes({params.s0B, params.j}), params.j);

    for (const double T : {1e-3, 2e-3, 5e-3}) {
        const double purity = reduced_purity(evolve_phase_coupling(psi0, params, T));
        const double series = 1.0 - 0.5 * T * T * dA2 * dB2;  // lambda = 1
        CHECK(std::abs(purity - series) < 1e-9);
    }
}

TEST_CASE("reduced_purity: closed cases and four-index oracle") {
    CHECK(std::abs(reduced_purity(product_state(kShippedParams)) - 1.0) < 1e-13);

    TwoSpinState bell{0.5, {cplx{1.0 / std::sqrt(2.0), 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0},
                            cplx{1.0 / std::sqrt(2.0), 0.0}}};
    CHECK(std::abs(reduced_purity(bell) - 0.5) < 1e-14);

    const double T = kShippedParams.tau_to_time(0.1);
    const double p =
        reduced_purity(evolve_phase_coupling(product_state(kShippedParams), kShippedParams, T));
    CHECK(std::abs(p - oracles::four_index_purity(kShippedParams, T)) < 1e-11);

    TwoSpinState unnormalized = bell;
    unnormalized.amp[0] *= 2.0;
    CHECK_THROWS_AS(reduced_purity(unnormalized), spinsemi::ConfigError);
}

TEST_CASE("reduced_purity: invariant under swapping the parts") {
    const double T = kShippedParams.tau_to_time(0.37);
    QuantumParams skew = kShippedParams;
    skew.s0A = cplx{0.6, 0.3};
    skew.s0B = cplx{-0.2, 1.1};
    const TwoSpinState evolved = evolve_phase_coupling(product_state(skew), skew, T);

    const int dim = evolved.dim();
    TwoSpinState swapped = evolved;
    for (int nA = 0; nA < dim; ++nA)
        for (int nB = 0; nB < dim; ++nB)
            swapped.amp[static_cast<size_t>(nB) * dim + nA] =
                evolved.amp[static_cast<size_t>(nA) * dim + nB];
    CHECK(std::abs(reduced_purity(evolved) - reduced_purity(swapped)) < 1e-12);
}

TEST_CASE("exact_entropy_series: boundary values, symmetry, bounds") {
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
    const EntropySeries series = exact_entropy_series(kShippedParams, grid);

    CHECK(std::abs(series.exact.front()) < 1e-12);  // tau = 0
    CHECK(std::abs(series.exact.back()) < 1e-10);   // tau = 1 (revival)

    const double bound = 1.0 - 1.0 / (2.0 * kShippedParams.j + 1.0);
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(series.exact[i] > -1e-12);
        CHECK(series.exact[i] < bound + 1e-12);
        // S(tau) = S(1 - tau)
        CHECK(std::abs(series.exact[i] - series.exact[grid.size() - 1 - i]) < 1e-10);
    }

    // partial trace is the authority; the closed form must agree mid-grid too
    const double T = kShippedParams.tau_to_time(0.5);
    const double p =
        reduced_purity(evolve_phase_coupling(product_state(kShippedParams), kShippedParams, T));
    CHECK(std::abs(series.exact[50] - (1.0 - p)) < 1e-12);
}
