#include "spinsemi/classical.hpp"

#include <cmath>

namespace spinsemi::classical {

namespace {

constexpr double kChartTol = 1e-13;

cplx chart_factor(cplx u, cplx v, const char* where) {
    const cplx f = 1.0 + u * v;
    if (std::abs(f) < kChartTol)
        throw SingularityError(std::string("coordinate chart singular (1+uv=0) in ") + where);
    return f;
}

} // namespace

bool PhasePoint::real_sector(double tol) const {
    return std::abs(vA - std::conj(uA)) <= tol && std::abs(vB - std::conj(uB)) <= tol;
}

void PhasePoint::assert_chart() const {
    chart_factor(uA, vA, "part A");
    chart_factor(uB, vB, "part B");
}

cplx classical_hamiltonian(const PhasePoint& p, const QuantumParams& params) {
    p.assert_chart();
    const cplx hA = (1.0 - p.uA * p.vA) / (1.0 + p.uA * p.vA);
    const cplx hB = (1.0 - p.uB * p.vB) / (1.0 + p.uB * p.vB);
    return params.lambda * params.hbar * params.j * params.j * hA * hB;
}

cplx lambda_exponent_A(const PhasePoint& p, const QuantumParams& params) {
    const cplx w = p.uA * p.vA;
    chart_factor(p.uA, p.vA, "lambda_A");
    return cplx{0.0, 1.0} * params.lambda * params.j * (1.0 - w) / (1.0 + w);
}

cplx lambda_exponent_B(const PhasePoint& p, const QuantumParams& params) {
    const cplx w = p.uB * p.vB;
    chart_factor(p.uB, p.vB, "lambda_B");
    return cplx{0.0, 1.0} * params.lambda * params.j * (1.0 - w) / (1.0 + w);
}

AnalyticTrajectory make_trajectory(const PhasePoint& p0, const QuantumParams& params, cplx T) {
    p0.assert_chart();
    return AnalyticTrajectory{p0, lambda_exponent_A(p0, params), lambda_exponent_B(p0, params), T};
}

PhasePoint AnalyticTrajectory::point_at(cplx t) const {
    const cplx eB = std::exp(lambdaB * t);
    const cplx eA = std::exp(lambdaA * t);
    return PhasePoint{initial.uA * eB, initial.uB * eA, initial.vA / eB, initial.vB / eA};
}

PhasePoint flow(const PhasePoint& p0, const QuantumParams& params, cplx t) {
    return make_trajectory(p0, params, t).point_at(t);
}

StabilityBlocks stability(const PhasePoint& p0, const QuantumParams& params, cplx T) {
    p0.assert_chart();
    const cplx i2lj = cplx{0.0, -2.0} * params.lambda * params.j;
    const cplx fA = 1.0 + p0.uA * p0.vA;
    const cplx fB = 1.0 + p0.uB * p0.vB;
    // sensitivities of the exponents to the initial point
    const cplx dlamA_du = i2lj * p0.vA / (fA * fA);
    const cplx dlamA_dv = i2lj * p0.uA / (fA * fA);
    const cplx dlamB_du = i2lj * p0.vB / (fB * fB);
    const cplx dlamB_dv = i2lj * p0.uB / (fB * fB);

    const cplx eA = std::exp(lambda_exponent_A(p0, params) * T);
    const cplx eB = std::exp(lambda_exponent_B(p0, params) * T);

    StabilityBlocks blocks{ComplexMatrix(2, 2), ComplexMatrix(2, 2), ComplexMatrix(2, 2),
                           ComplexMatrix(2, 2)};
    // uA'' = uA' eB;  uB'' = uB' eA
    blocks.Muu(0, 0) = eB;
    blocks.Muu(0, 1) = p0.uA * T * eB * dlamB_du;
    blocks.Muu(1, 0) = p0.uB * T * eA * dlamA_du;
    blocks.Muu(1, 1) = eA;
    blocks.Muv(0, 0) = 0.0;
    blocks.Muv(0, 1) = p0.uA * T * eB * dlamB_dv;
    blocks.Muv(1, 0) = p0.uB * T * eA * dlamA_dv;
    blocks.Muv(1, 1) = 0.0;
    // vA'' = vA' / eB;  vB'' = vB' / eA
    blocks.Mvu(0, 0) = 0.0;
    blocks.Mvu(0, 1) = -p0.vA * T / eB * dlamB_du;
    blocks.Mvu(1, 0) = -p0.vB * T / eA * dlamA_du;
    blocks.Mvu(1, 1) = 0.0;
    blocks.Mvv(0, 0) = 1.0 / eB;
    blocks.Mvv(0, 1) = -p0.vA * T / eB * dlamB_dv;
    blocks.Mvv(1, 0) = -p0.vB * T / eA * dlamA_dv;
    blocks.Mvv(1, 1) = 1.0 / eA;
    return blocks;
}

ComplexMatrix StabilityBlocks::assemble() const {
    ComplexMatrix m(4, 4);
    m.set_block(0, 0, Muu);
    m.set_block(0, 2, Muv);
    m.set_block(2, 0, Mvu);
    m.set_block(2, 2, Mvv);
    return m;
}

ComplexMatrix StabilityBlocks::assemble_star() const {
    const ComplexMatrix flip{{cplx{-1.0, 0.0}, cplx{0.0, 0.0}}, {cplx{0.0, 0.0}, cplx{1.0, 0.0}}};
    ComplexMatrix m(4, 4);
    m.set_block(0, 0, Muu);
    m.set_block(0, 2, flip * Muv);
    m.set_block(2, 0, flip * Mvu);
    m.set_block(2, 2, Mvv);
    return m;
}

ActionIngredients action_ingredients(const AnalyticTrajectory& traj, const QuantumParams& params,
                                     int xi) {
    if (xi != 1 && xi != -1) throw ConfigError("xi must be +1 or -1");
    const PhasePoint& p0 = traj.initial;
    p0.assert_chart();
    const PhasePoint pT = traj.final_point();
    pT.assert_chart();

    const cplx wA = p0.uA * p0.vA;
    const cplx wB = p0.uB * p0.vB;

    ActionIngredients ing;
    // chi_A = (du/dt vA - uA dv/dt)/(1+uA vA) = 2 lamB wA/(1+wA); constant in t
    ing.chiA = 2.0 * traj.lambdaB * wA / (1.0 + wA);
    ing.chiB = 2.0 * traj.lambdaA * wB / (1.0 + wB);

    const cplx h_value = classical_hamiltonian(p0, params);  // conserved
    const cplx ihj = cplx{0.0, 1.0} * params.hbar * params.j;
    ing.action_integral = (ihj * (ing.chiA + ing.chiB) - h_value) * traj.T;

    // phase-space divergence of the flow is 2(lamA + lamB)
    ing.g_correction =
        cplx{0.0, 0.5} * params.hbar * static_cast<double>(xi) * (traj.lambdaA + traj.lambdaB) * traj.T;

    ing.lambda_tilde = std::log((1.0 + p0.uA * p0.vA) * (1.0 + pT.uA * pT.vA)) +
                       std::log((1.0 + p0.uB * p0.vB) * (1.0 + pT.uB * pT.vB));
    return ing;
}

cplx ActionIngredients::action(int xi, double hbar, double j) const {
    return static_cast<double>(xi) * action_integral - cplx{0.0, 1.0} * hbar * j * lambda_tilde;
}

namespace {

// Newton iterations for the two boundary-value helpers; the Jacobians are the
// corresponding stability blocks, which are cheap and analytic.
constexpr int kBvpMaxIter = 60;
constexpr double kBvpTol = 1e-13;

} // namespace

PhasePoint solve_initial_v(const cplx uA0, const cplx uB0, cplx vA_final, cplx vB_final,
                           const QuantumParams& params, cplx T, const PhasePoint& seed) {
    PhasePoint p{uA0, uB0, seed.vA, seed.vB};
    for (int iter = 0; iter < kBvpMaxIter; ++iter) {
        const PhasePoint pT = flow(p, params, T);
        const cplx rA = pT.vA - vA_final;
        const cplx rB = pT.vB - vB_final;
        if (std::abs(rA) + std::abs(rB) < kBvpTol) return p;
        const StabilityBlocks blocks = stability(p, params, T);
        const ComplexMatrix inv = linalg::inverse(blocks.Mvv);
        p.vA -= inv(0, 0) * rA + inv(0, 1) * rB;
        p.vB -= inv(1, 0) * rA + inv(1, 1) * rB;
    }
    throw NumericError("solve_initial_v did not converge");
}

PhasePoint solve_initial_u(const cplx vA0, const cplx vB0, cplx uA_final, cplx uB_final,
                           const QuantumParams& params, cplx T, const PhasePoint& seed) {
    PhasePoint p{seed.uA, seed.uB, vA0, vB0};
    for (int iter = 0; iter < kBvpMaxIter; ++iter) {
        const PhasePoint pT = flow(p, params, T);
        const cplx rA = pT.uA - uA_final;
        const cplx rB = pT.uB - uB_final;
        if (std::abs(rA) + std::abs(rB) < kBvpTol) return p;
        const StabilityBlocks blocks = stability(p, params, T);
        const ComplexMatrix inv = linalg::inverse(blocks.Muu);
        p.uA -= inv(0, 0) * rA + inv(0, 1) * rB;
        p.uB -= inv(1, 0) * rA + inv(1, 1) * rB;
    }
    throw NumericError("solve_initial_u did not converge");
}

namespace {

// selector-weighted 2x2 matrices entering the second-derivative identities
ComplexMatrix matrix_A(const PhasePoint& p, double j) {
    const cplx f = 1.0 + p.uA * p.vA;
    ComplexMatrix m(2, 2);
    m(0, 0) = 2.0 * j / (f * f);
    return m;
}

ComplexMatrix matrix_B(const PhasePoint& p, double j) {
    const cplx f = 1.0 + p.uB * p.vB;
    ComplexMatrix m(2, 2);
    m(1, 1) = 2.0 * j / (f * f);
    return m;
}

} // namespace

VariaSReport verify_variaS(const AnalyticTrajectory& traj, const QuantumParams& params) {
    const PhasePoint p0 = traj.initial;
    const PhasePoint pT = traj.final_point();
    const double hbar = params.hbar;
    const double j = params.j;
    const cplx ihj = cplx{0.0, 1.0} * hbar * j;
    const cplx T = traj.T;

    VariaSReport report;
    auto track = [](double& slot, cplx got, cplx want) {
        const double scale = std::max(1.0, std::abs(want));
        slot = std::max(slot, std::abs(got - want) / scale);
    };

    // --- first derivatives of S as a function of its boundary labels ---

    // xi = +1: S_+(u', v''). Perturbing one label re-solves the trajectory.
    auto action_plus = [&](cplx uA0, cplx uB0, cplx vAf, cplx vBf) {
        const PhasePoint p = solve_initial_v(uA0, uB0, vAf, vBf, params, T, p0);
        const ActionIngredients ing = action_ingredients(make_trajectory(p, params, T), params, +1);
        return ing.action(+1, hbar, j);
    };
    // xi = -1: S_-(v', u'').
    auto action_minus = [&](cplx vA0, cplx vB0, cplx uAf, cplx uBf) {
        const PhasePoint p = solve_initial_u(vA0, vB0, uAf, uBf, params, T, p0);
        const ActionIngredients ing = action_ingredients(make_trajectory(p, params, T), params, -1);
        return ing.action(-1, hbar, j);
    };

    using linalg::finite_difference_derivative;
    const double h = 1e-6;

    cplx got = finite_difference_derivative(
        [&](cplx x) { return action_plus(x, p0.uB, pT.vA, pT.vB); }, p0.uA, h);
    track(report.max_first_derivative_residual, got,
          -2.0 * ihj * p0.vA / (1.0 + p0.uA * p0.vA));
    got = finite_difference_derivative(
        [&](cplx x) { return action_plus(p0.uA, x, pT.vA, pT.vB); }, p0.uB, h);
    track(report.max_first_derivative_residual, got,
          -2.0 * ihj * p0.vB / (1.0 + p0.uB * p0.vB));
    got = finite_difference_derivative(
        [&](cplx x) { return action_plus(p0.uA, p0.uB, x, pT.vB); }, pT.vA, h);
    track(report.max_first_derivative_residual, got,
          -2.0 * ihj * pT.uA / (1.0 + pT.uA * pT.vA));
    got = finite_difference_derivative(
        [&](cplx x) { return action_plus(p0.uA, p0.uB, pT.vA, x); }, pT.vB, h);
    track(report.max_first_derivative_residual, got,
          -2.0 * ihj * pT.uB / (1.0 + pT.uB * pT.vB));

    got = finite_difference_derivative(
        [&](cplx x) { return action_minus(p0.vA, p0.vB, x, pT.uB); }, pT.uA, h);
    track(report.max_first_derivative_residual, got,
          -2.0 * ihj * pT.vA / (1.0 + pT.uA * pT.vA));
    got = finite_difference_derivative(
        [&](cplx x) { return action_minus(p0.vA, p0.vB, pT.uA, x); }, pT.uB, h);
    track(report.max_first_derivative_residual, got,
          -2.0 * ihj * pT.vB / (1.0 + pT.uB * pT.vB));
    // bottom-right relation of the printed table, with the u'_A reading
    got = finite_difference_derivative(
        [&](cplx x) { return action_minus(x, p0.vB, pT.uA, pT.uB); }, p0.vA, h);
    track(report.max_first_derivative_residual, got,
          -2.0 * ihj * p0.uA / (1.0 + p0.uA * p0.vA));
    got = finite_difference_derivative(
        [&](cplx x) { return action_minus(p0.vA, x, pT.uA, pT.uB); }, p0.vB, h);
    track(report.max_first_derivative_residual, got,
          -2.0 * ihj * p0.uB / (1.0 + p0.uB * p0.vB));

    // --- second-derivative identities against the stability blocks ---

    const StabilityBlocks blocks = stability(p0, params, T);
    const ComplexMatrix inv_vv = linalg::inverse(blocks.Mvv);
    const ComplexMatrix inv_uu = linalg::inverse(blocks.Muu);
    const ComplexMatrix AB0 = matrix_A(p0, j) + matrix_B(p0, j);
    const ComplexMatrix ABT = matrix_A(pT, j) + matrix_B(pT, j);
    ComplexMatrix Cpp(2, 2), Dpp(2, 2);
    {
        const ComplexMatrix At = matrix_A(pT, j), Bt = matrix_B(pT, j);
        Cpp = At * (pT.uA * pT.uA) + Bt * (pT.uB * pT.uB);
        Dpp = At * (pT.vA * pT.vA) + Bt * (pT.vB * pT.vB);
    }

    // closed-form first derivatives as functions of the boundary labels
    auto dSp_du = [&](int a, cplx uA0, cplx uB0, cplx vAf, cplx vBf) {
        const PhasePoint p = solve_initial_v(uA0, uB0, vAf, vBf, params, T, p0);
        return a == 0 ? -2.0 * ihj * p.vA / (1.0 + p.uA * p.vA)
                      : -2.0 * ihj * p.vB / (1.0 + p.uB * p.vB);
    };
    auto dSp_dvpp = [&](int a, cplx uA0, cplx uB0, cplx vAf, cplx vBf) {
        const PhasePoint p = solve_initial_v(uA0, uB0, vAf, vBf, params, T, p0);
        const PhasePoint pf = flow(p, params, T);
        return a == 0 ? -2.0 * ihj * pf.uA / (1.0 + pf.uA * pf.vA)
                      : -2.0 * ihj * pf.uB / (1.0 + pf.uB * pf.vB);
    };
    auto dSm_dvp = [&](int a, cplx vA0, cplx vB0, cplx uAf, cplx uBf) {
        const PhasePoint p = solve_initial_u(vA0, vB0, uAf, uBf, params, T, p0);
        return a == 0 ? -2.0 * ihj * p.uA / (1.0 + p.uA * p.vA)
                      : -2.0 * ihj * p.uB / (1.0 + p.uB * p.vB);
    };
    auto dSm_dupp = [&](int a, cplx vA0, cplx vB0, cplx uAf, cplx uBf) {
        const PhasePoint p = solve_initial_u(vA0, vB0, uAf, uBf, params, T, p0);
        const PhasePoint pf = flow(p, params, T);
        return a == 0 ? -2.0 * ihj * pf.vA / (1.0 + pf.uA * pf.vA)
                      : -2.0 * ihj * pf.vB / (1.0 + pf.uB * pf.vB);
    };

    const cplx i_over_h = cplx{0.0, 1.0} / hbar;
    auto track_matrix = [&](const ComplexMatrix& got_m, const ComplexMatrix& want_m) {
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                track(report.max_stom_residual, got_m(r, c), want_m(r, c));
    };

    // (i/hbar) S+_{u'v''} = (A'+B') Mvv^{-1}
    {
        ComplexMatrix got_m(2, 2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                auto fn = [&](cplx x) {
                    const cplx vAf = b == 0 ? x : pT.vA;
                    const cplx vBf = b == 1 ? x : pT.vB;
                    return dSp_du(a, p0.uA, p0.uB, vAf, vBf);
                };
                got_m(a, b) = i_over_h * finite_difference_derivative(fn, b == 0 ? pT.vA : pT.vB, h);
            }
        track_matrix(got_m, AB0 * inv_vv);
    }
    // (i/hbar) S-_{v'u''} = (A'+B') Muu^{-1}
    {
        ComplexMatrix got_m(2, 2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                auto fn = [&](cplx x) {
                    const cplx uAf = b == 0 ? x : pT.uA;
                    const cplx uBf = b == 1 ? x : pT.uB;
                    return dSm_dvp(a, p0.vA, p0.vB, uAf, uBf);
                };
                got_m(a, b) = i_over_h * finite_difference_derivative(fn, b == 0 ? pT.uA : pT.uB, h);
            }
        track_matrix(got_m, AB0 * inv_uu);
    }
    // (i/hbar) S+_{v''v''} = (A''+B'') Muv Mvv^{-1} - C''
    {
        ComplexMatrix got_m(2, 2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                auto fn = [&](cplx x) {
                    const cplx vAf = b == 0 ? x : pT.vA;
                    const cplx vBf = b == 1 ? x : pT.vB;
                    return dSp_dvpp(a, p0.uA, p0.uB, vAf, vBf);
                };
                got_m(a, b) = i_over_h * finite_difference_derivative(fn, b == 0 ? pT.vA : pT.vB, h);
            }
        track_matrix(got_m, ABT * blocks.Muv * inv_vv - Cpp);
    }
    // (i/hbar) S-_{u''u''} = (A''+B'') Mvu Muu^{-1} - D''
    {
        ComplexMatrix got_m(2, 2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                auto fn = [&](cplx x) {
                    const cplx uAf = b == 0 ? x : pT.uA;
                    const cplx uBf = b == 1 ? x : pT.uB;
                    return dSm_dupp(a, p0.vA, p0.vB, uAf, uBf);
                };
                got_m(a, b) = i_over_h * finite_difference_derivative(fn, b == 0 ? pT.uA : pT.uB, h);
            }
        track_matrix(got_m, ABT * blocks.Mvu * inv_uu - Dpp);
    }

    return report;
}

cplx det_M(const PhasePoint& p0, const QuantumParams& params, cplx T) {
    return linalg::det(stability(p0, params, T).assemble());
}

cplx det_M_endpoint_ratio(const PhasePoint& initial, const PhasePoint& final_point) {
    const cplx num = (1.0 + final_point.uA * final_point.vA) * (1.0 + final_point.uB * final_point.vB);
    const cplx den = (1.0 + initial.uA * initial.vA) * (1.0 + initial.uB * initial.vB);
    return (num * num) / (den * den);
}

cplx det_M_star_closed_form(const QuantumParams& params, cplx T) {
    const double qA = std::norm(params.s0A);
    const double qB = std::norm(params.s0B);
    const double c = 16.0 * params.j * params.j * params.lambda * params.lambda * qA * qB /
                     ((1.0 + qA) * (1.0 + qA) * (1.0 + qB) * (1.0 + qB));
    return 1.0 + c * T * T;
}

cplx det_M_star(const PhasePoint& p0, const QuantumParams& params, cplx T) {
    if (!p0.real_sector(1e-10))
        throw ConfigError("det_M_star is a diagnostic of real-sector points");
    const cplx value = linalg::det(stability(p0, params, T).assemble_star());
    // the closed form is written in terms of |s0|^2 = u v of the real point
    QuantumParams q = params;
    q.s0A = p0.uA;
    q.s0B = p0.uB;
    const cplx closed = det_M_star_closed_form(q, T);
    if (std::abs(value - closed) > 1e-10 * std::max(1.0, std::abs(closed)))
        throw NumericError("det_M_star assembly disagrees with the closed form");
    return value;
}

cplx critical_time(const QuantumParams& params) {
    const double qA = std::norm(params.s0A);
    const double qB = std::norm(params.s0B);
    if (qA == 0.0 || qB == 0.0) throw ConfigError("critical time undefined for polar labels");
    return cplx{0.0, 1.0} * (1.0 + qA) * (1.0 + qB) /
           (4.0 * params.j * params.lambda * std::sqrt(qA * qB));
}

} // namespace spinsemi::classical
