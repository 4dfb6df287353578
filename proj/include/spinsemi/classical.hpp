#ifndef SPINSEMI_CLASSICAL_HPP
#define SPINSEMI_CLASSICAL_HPP

#include <complex>

#include "spinsemi/complex_linalg.hpp"
#include "spinsemi/params.hpp"

namespace spinsemi::classical {

using spinsemi::cplx;
using spinsemi::QuantumParams;
using linalg::ComplexMatrix;

// Point of the complexified phase space. u and v are independent; a point is
// in the real sector when v = u^* for both parts.
struct PhasePoint {
    cplx uA{0.0, 0.0};
    cplx uB{0.0, 0.0};
    cplx vA{0.0, 0.0};
    cplx vB{0.0, 0.0};

    bool real_sector(double tol = 1e-12) const;
    void assert_chart() const;  // throws SingularityError when 1 + u v = 0
};

// Solution of the equations of motion for the phase-coupling model:
//   uA(t) = uA' e^{+lamB t},  uB(t) = uB' e^{+lamA t},
//   vA(t) = vA' e^{-lamB t},  vB(t) = vB' e^{-lamA t},
// with lamA = i lambda j (1 - uA'vA')/(1 + uA'vA') and A<->B for lamB.
// Both uv products are conserved, so the exponents are constants.
struct AnalyticTrajectory {
    PhasePoint initial;
    cplx lambdaA{0.0, 0.0};
    cplx lambdaB{0.0, 0.0};
    cplx T{0.0, 0.0};

    PhasePoint point_at(cplx t) const;
    PhasePoint final_point() const { return point_at(T); }
};

// 2x2 blocks of the stability matrix, ordering (A, B) within each block:
// (d u'', d v'')^T = [[Muu, Muv], [Mvu, Mvv]] (d u', d v')^T.
struct StabilityBlocks {
    ComplexMatrix Muu, Muv, Mvu, Mvv;

    ComplexMatrix assemble() const;       // 4x4
    ComplexMatrix assemble_star() const;  // 4x4 with Muv, Mvu left-multiplied by diag(-1,1)
};

// Closed-form pieces entering one semiclassical propagator exponent:
//   action_integral = int_0^T (i hbar j chi - H) dt      (no xi factor)
//   g_correction    = (i hbar xi / 4) int (div) dt = i hbar xi (lamA + lamB) T / 2
//   lambda_tilde    = ln[(1+u'A v'A)(1+u''A v''A)] + (B part)
struct ActionIngredients {
    cplx action_integral{0.0, 0.0};
    cplx g_correction{0.0, 0.0};
    cplx lambda_tilde{0.0, 0.0};
    cplx chiA{0.0, 0.0};
    cplx chiB{0.0, 0.0};

    // S_xi = xi * action_integral - i hbar j lambda_tilde
    cplx action(int xi, double hbar, double j) const;
};

// H(u,v) = lambda hbar j^2 [(1-uA vA)/(1+uA vA)] [(1-uB vB)/(1+uB vB)]
cplx classical_hamiltonian(const PhasePoint& p, const QuantumParams& params);

cplx lambda_exponent_A(const PhasePoint& p, const QuantumParams& params);
cplx lambda_exponent_B(const PhasePoint& p, const QuantumParams& params);

AnalyticTrajectory make_trajectory(const PhasePoint& p0, const QuantumParams& params, cplx T);

PhasePoint flow(const PhasePoint& p0, const QuantumParams& params, cplx t);

// Analytic Jacobian of the flow with respect to (uA', uB', vA', vB'),
// including the sensitivity of the exponents to the initial point.
StabilityBlocks stability(const PhasePoint& p0, const QuantumParams& params, cplx T);

ActionIngredients action_ingredients(const AnalyticTrajectory& traj, const QuantumParams& params,
                                     int xi);

// Residual report of the first-derivative relations of the action and of the
// second-derivative / stability-block identities, all evaluated numerically
// against the closed forms. Diagnostic only; never throws on large residuals.
struct VariaSReport {
    double max_first_derivative_residual = 0.0;  // relative, over the 8 relations
    double max_stom_residual = 0.0;              // relative, over the 4 block identities
};

VariaSReport verify_variaS(const AnalyticTrajectory& traj, const QuantumParams& params);

// Boundary-value helpers: recover the free initial half given the fixed one
// and a target final half (Newton on the analytic flow).
PhasePoint solve_initial_v(const cplx uA0, const cplx uB0, cplx vA_final, cplx vB_final,
                           const QuantumParams& params, cplx T, const PhasePoint& seed);
PhasePoint solve_initial_u(const cplx vA0, const cplx vB0, cplx uA_final, cplx uB_final,
                           const QuantumParams& params, cplx T, const PhasePoint& seed);

cplx det_M(const PhasePoint& p0, const QuantumParams& params, cplx T);

// [(1+uA''vA'')^2 (1+uB''vB'')^2] / [(1+uA'vA')^2 (1+uB'vB')^2]
cplx det_M_endpoint_ratio(const PhasePoint& initial, const PhasePoint& final_point);

// det of the star matrix for a real-sector initial point; checked against the
// closed form below and rejected if they disagree beyond 1e-10.
cplx det_M_star(const PhasePoint& p0, const QuantumParams& params, cplx T);

// 1 + 16 j^2 lambda^2 |s0A|^2 |s0B|^2 T^2 / [(1+|s0A|^2)^2 (1+|s0B|^2)^2]
cplx det_M_star_closed_form(const QuantumParams& params, cplx T);

// complex time at which det_M_star vanishes (positive imaginary branch)
cplx critical_time(const QuantumParams& params);

} // namespace spinsemi::classical

#endif
