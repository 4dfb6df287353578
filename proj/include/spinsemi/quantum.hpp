#ifndef SPINSEMI_QUANTUM_HPP
#define SPINSEMI_QUANTUM_HPP

#include <complex>
#include <vector>

#include "spinsemi/params.hpp"

namespace spinsemi::quantum {

using spinsemi::cplx;
using spinsemi::QuantumParams;

// Spin coherent state |s>, labeled by the stereographic coordinate s
// (south pole s=0) for spin quantum number j.
struct CoherentLabel {
    cplx s{0.0, 0.0};
    double j = 0.5;
};

// Pure state of two spins with equal j; amp[nA * dim + nB] for nA, nB = 0..2j,
// where n counts raising steps above |-j> (so the Jz eigenvalue is m = n - j).
struct TwoSpinState {
    double j = 0.5;
    std::vector<cplx> amp;

    int dim() const;
    double norm() const;
};

// Shared time-series container: tau grid plus exact and/or semiclassical
// entropy columns (a column not produced by the caller stays empty).
struct EntropySeries {
    std::vector<double> tau;
    std::vector<double> exact;
    std::vector<double> semiclassical;
    std::vector<int> sets_active;  // semiclassical runs only
};

// Amplitudes of |s> in the n-basis: a_n = sqrt(C(2j,n)) s^n / (1+|s|^2)^j.
std::vector<cplx> coherent_amplitudes(const CoherentLabel& label);

// <a|b> = (1 + a.s^* b.s)^{2j} / [(1+|b.s|^2)^j (1+|a.s|^2)^j]
cplx overlap(const CoherentLabel& a, const CoherentLabel& b);

// |s0A> (x) |s0B>
TwoSpinState product_state(const QuantumParams& params);

// Evolution under H = lambda hbar Jz_A (x) Jz_B: the (nA, nB) amplitude picks
// up exp(-i lambda T mA mB) with m = n - j.
TwoSpinState evolve_phase_coupling(const TwoSpinState& state, const QuantumParams& params,
                                   double T);

// Purity of the reduced state, Tr_A[(Tr_B rho)^2], by explicit partial trace.
double reduced_purity(const TwoSpinState& state);

// Closed-form purity of the evolved product state:
//   P(T) = sum c_nA c_mA c_nB c_mB exp(-i lambda T deltaA deltaB),
// with c_n = C(2j,n) |s0|^{2n} / (1+|s0|^2)^{2j} and delta = n - m.
double closed_form_purity(const QuantumParams& params, double T);

// Exact linear entropy S = 1 - P over the tau grid (tau = T / (2 pi / lambda)).
// Every point is computed by partial trace and cross-checked against the
// closed form; disagreement beyond 1e-10 throws ConventionError.
EntropySeries exact_entropy_series(const QuantumParams& params,
                                   const std::vector<double>& tau_grid);

// log-binomial-backed binomial coefficient, exact for small arguments
double binomial(int n, int k);

} // namespace spinsemi::quantum

#endif
