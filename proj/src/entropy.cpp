#include "spinsemi/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace spinsemi::entropy {

namespace {

using classical::AnalyticTrajectory;
using classical::PhasePoint;
using classical::StabilityBlocks;

constexpr std::array<int, 4> kXi{+1, -1, +1, -1};

cplx ipow(cplx z, int n) {
    if (n < 0) return 1.0 / ipow(z, -n);
    cplx out{1.0, 0.0};
    while (n > 0) {
        if (n & 1) out *= z;
        z *= z;
        n >>= 1;
    }
    return out;
}

ComplexMatrix selector_A() {
    ComplexMatrix m(2, 2);
    m(0, 0) = 1.0;
    return m;
}

ComplexMatrix selector_B() {
    ComplexMatrix m(2, 2);
    m(1, 1) = 1.0;
    return m;
}

} // namespace

ComplexMatrix build_F_matrix(const saddle::TrajectorySet& set, const QuantumParams& params) {
    const cplx T = set.traj[0].T;
    std::array<StabilityBlocks, 4> blocks{
        classical::stability(set.traj[0].initial, params, T),
        classical::stability(set.traj[1].initial, params, T),
        classical::stability(set.traj[2].initial, params, T),
        classical::stability(set.traj[3].initial, params, T)};

    const ComplexMatrix IA = selector_A();
    const ComplexMatrix IB = selector_B();
    const cplx minus_one{-1.0, 0.0};

    ComplexMatrix F(8, 8);
    F.set_block(0, 0, blocks[0].Muv * minus_one);
    F.set_block(0, 2, IB * blocks[1].Muu);
    F.set_block(0, 6, IA * blocks[3].Muu);
    F.set_block(2, 0, IB * blocks[0].Mvv);
    F.set_block(2, 2, blocks[1].Mvu * minus_one);
    F.set_block(2, 4, IA * blocks[2].Mvv);
    F.set_block(4, 2, IA * blocks[1].Muu);
    F.set_block(4, 4, blocks[2].Muv * minus_one);
    F.set_block(4, 6, IB * blocks[3].Muu);
    F.set_block(6, 0, IA * blocks[0].Mvv);
    F.set_block(6, 4, IB * blocks[2].Mvv);
    F.set_block(6, 6, blocks[3].Mvu * minus_one);
    return F;
}

namespace {

// branch-free ingredients of one set's term
struct SetGeometry {
    cplx Afactor{1.0, 0.0};     // A as displayed (single-valued)
    cplx sqrt_Afactor{1.0, 0.0};  // exact square root, see below
    cplx Fdet{1.0, 0.0};
    cplx phase{0.0, 0.0};
};

SetGeometry set_geometry(const saddle::TrajectorySet& set, const QuantumParams& params) {
    SetGeometry geo;
    geo.Fdet = linalg::det(build_F_matrix(set, params));
    if (std::abs(geo.Fdet) < 1e-100) throw CausticError("det F = 0 (caustic)");
    if (!std::isfinite(geo.Fdet.real()) || !std::isfinite(geo.Fdet.imag()))
        throw NumericError("contribution: det F overflowed");

    // A = A_A A_B with A_P = prod_k [(1+u''v'')/(1+u'v')] [(1+u'v')/(1+|s0|^2)]^2j.
    // The reciprocal pairing x2 = x3 = 1/x1, x4 = x1 makes the initial products
    // repeat pairwise, so the 2j-th powers assemble into the square of
    // G_P = (1+w_1P)(1+w_2P)/(1+|s0P|^2)^2 and sqrt(A) = sqrt(ratios) (G_A G_B)^2j
    // is single-valued: only det F carries a branch choice.
    const int two_j = static_cast<int>(std::lround(2.0 * params.j));
    const double normA = 1.0 + std::norm(params.s0A);
    const double normB = 1.0 + std::norm(params.s0B);
    cplx ratio_product{1.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        const PhasePoint p0 = set.traj[k].initial;
        const PhasePoint pT = set.traj[k].final_point();
        ratio_product *= (1.0 + pT.uA * pT.vA) / (1.0 + p0.uA * p0.vA);
        ratio_product *= (1.0 + pT.uB * pT.vB) / (1.0 + p0.uB * p0.vB);
    }
    const cplx w1A = set.traj[0].initial.uA * set.traj[0].initial.vA;
    const cplx w2A = set.traj[1].initial.uA * set.traj[1].initial.vA;
    const cplx w1B = set.traj[0].initial.uB * set.traj[0].initial.vB;
    const cplx w3B = set.traj[2].initial.uB * set.traj[2].initial.vB;
    const cplx gA = (1.0 + w1A) * (1.0 + w2A) / (normA * normA);
    const cplx gB = (1.0 + w1B) * (1.0 + w3B) / (normB * normB);
    geo.sqrt_Afactor = std::sqrt(ratio_product) * ipow(gA * gB, two_j);
    geo.Afactor = ratio_product * ipow(gA * gB, 2 * two_j);

    cplx phase_sum{0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        const classical::ActionIngredients ing =
            classical::action_ingredients(set.traj[k], params, kXi[k]);
        const cplx Fk = ing.action_integral + ing.g_correction;
        phase_sum += (k % 2 == 0 ? Fk : -Fk);
    }
    geo.phase = cplx{0.0, 1.0} / params.hbar * phase_sum;

    if (!std::isfinite(geo.sqrt_Afactor.real()) || !std::isfinite(geo.sqrt_Afactor.imag()))
        throw NumericError("contribution: endpoint factors overflowed");
    return geo;
}

// An uninitialized tracker is anchored so that sqrt(A)/sqrt(det F) starts on
// the principal branch of sqrt(A/det F); afterwards only det F is followed.
cplx tracked_sqrt_detF(const SetGeometry& geo, linalg::BranchTracker& tracker) {
    if (!tracker.initialized) {
        const cplx anchor = std::sqrt(geo.Afactor / geo.Fdet);
        if (anchor != cplx{0.0, 0.0}) {
            tracker.initialized = true;
            tracker.previous = geo.sqrt_Afactor / anchor;
        }
    }
    return linalg::sqrt_continuous(geo.Fdet, tracker);
}

// Branch anchor: sqrt(det F) continued along the straight matrix pencil from
// the real set's F (whose square root is the positive one, fixed by the
// tau -> 0 limit) to this set's F at the same time. This carries the
// orientation of the Gaussian integration manifold from the real saddle to
// the complex one instead of guessing a principal branch.
bool pencil_step(const ComplexMatrix& F_real, const ComplexMatrix& F_set, double sa, cplx za,
                 double sb, cplx zb, linalg::BranchTracker& tracker, int depth) {
    if (std::abs(zb - za) <= 0.5 * std::max(std::abs(za), std::abs(zb))) {
        linalg::sqrt_continuous(zb, tracker);
        return true;
    }
    if (depth >= 14) return false;
    const double sm = 0.5 * (sa + sb);
    ComplexMatrix F(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) F(i, j) = (1.0 - sm) * F_real(i, j) + sm * F_set(i, j);
    const cplx zm = linalg::det(F);
    if (!std::isfinite(zm.real()) || !std::isfinite(zm.imag())) return false;
    return pencil_step(F_real, F_set, sa, za, sm, zm, tracker, depth + 1) &&
           pencil_step(F_real, F_set, sm, zm, sb, zb, tracker, depth + 1);
}

bool pencil_sqrt_detF(const ComplexMatrix& F_real, const ComplexMatrix& F_set, cplx* out) {
    linalg::BranchTracker tracker;
    cplx prev = linalg::det(F_real);
    linalg::sqrt_continuous(prev, tracker);
    const int coarse = 32;
    double sa = 0.0;
    for (int k = 1; k <= coarse; ++k) {
        const double sb = static_cast<double>(k) / coarse;
        ComplexMatrix F(8, 8);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) F(i, j) = (1.0 - sb) * F_real(i, j) + sb * F_set(i, j);
        const cplx zb = linalg::det(F);
        if (!std::isfinite(zb.real()) || !std::isfinite(zb.imag())) return false;
        if (!pencil_step(F_real, F_set, sa, prev, sb, zb, tracker, 0)) return false;
        sa = sb;
        prev = zb;
    }
    *out = tracker.previous;
    return true;
}

} // namespace

SetContribution contribution(const saddle::TrajectorySet& set, const QuantumParams& params,
                             linalg::BranchTracker& tracker) {
    SetContribution out;
    out.set = set;
    const SetGeometry geo = set_geometry(set, params);
    out.Fdet = geo.Fdet;
    out.Afactor = geo.Afactor;
    out.phase = geo.phase;
    // the tracker follows sqrt(det F); sqrt(A) is evaluated on its exact branch
    out.value = geo.sqrt_Afactor / tracked_sqrt_detF(geo, tracker) * std::exp(out.phase);
    if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
        throw NumericError("contribution: value overflowed");
    return out;
}

cplx purity_q_matrix(const saddle::TrajectorySet& set, const QuantumParams& params) {
    const cplx T = set.traj[0].T;
    const double j = params.j;
    const double hbar = params.hbar;

    std::array<StabilityBlocks, 4> blocks;
    std::array<PhasePoint, 4> finals;
    std::array<classical::ActionIngredients, 4> ing;
    for (int k = 0; k < 4; ++k) {
        blocks[k] = classical::stability(set.traj[k].initial, params, T);
        finals[k] = set.traj[k].final_point();
        ing[k] = classical::action_ingredients(set.traj[k], params, kXi[k]);
    }

    // selector matrices at the final point of trajectory k
    auto matA = [&](int k) {
        const cplx f = 1.0 + finals[k].uA * finals[k].vA;
        return selector_A() * (2.0 * j / (f * f));
    };
    auto matB = [&](int k) {
        const cplx f = 1.0 + finals[k].uB * finals[k].vB;
        return selector_B() * (2.0 * j / (f * f));
    };

    // prefactors D_k = e^{Lambda_tilde}/(4 j^2) det[(i/hbar) S_k], with the
    // mixed second derivative taken from the stability-block identities:
    // (i/hbar) S+_{u'v''} = (A'+B') Mvv^{-1}, (i/hbar) S-_{v'u''} = (A'+B') Muu^{-1}
    std::array<cplx, 4> d_pref;
    for (int k = 0; k < 4; ++k) {
        const PhasePoint p0 = set.traj[k].initial;
        const cplx fA0 = 1.0 + p0.uA * p0.vA;
        const cplx fB0 = 1.0 + p0.uB * p0.vB;
        const cplx det_ab = (2.0 * j / (fA0 * fA0)) * (2.0 * j / (fB0 * fB0));
        const cplx det_m = linalg::det(kXi[k] > 0 ? blocks[k].Mvv : blocks[k].Muu);
        const cplx exp_lambda = fA0 * (1.0 + finals[k].uA * finals[k].vA) * fB0 *
                                (1.0 + finals[k].uB * finals[k].vB);
        d_pref[k] = exp_lambda / (4.0 * j * j) * det_ab / det_m;
    }

    // diagonal blocks R^(k): C'' cancels between the explicit overlap terms
    // and the StoM form of the own-variable second derivative, leaving
    // (A''+B'') Muv Mvv^{-1} (forward) or (A''+B'') Mvu Muu^{-1} (backward)
    auto R_of = [&](int k) {
        const ComplexMatrix ab = matA(k) + matB(k);
        return kXi[k] > 0 ? ab * blocks[k].Muv * linalg::inverse(blocks[k].Mvv)
                          : ab * blocks[k].Mvu * linalg::inverse(blocks[k].Muu);
    };

    ComplexMatrix Q(8, 8);
    const cplx minus_one{-1.0, 0.0};
    Q.set_block(0, 0, R_of(0) * minus_one);
    Q.set_block(0, 2, matB(1));
    Q.set_block(0, 6, matA(3));
    Q.set_block(2, 0, matB(0));
    Q.set_block(2, 2, R_of(1) * minus_one);
    Q.set_block(2, 4, matA(2));
    Q.set_block(4, 2, matA(1));
    Q.set_block(4, 4, R_of(2) * minus_one);
    Q.set_block(4, 6, matB(3));
    Q.set_block(6, 0, matA(0));
    Q.set_block(6, 4, matB(2));
    Q.set_block(6, 6, R_of(3) * minus_one);
    const cplx detQ = linalg::det(Q);
    if (std::abs(detQ) < 1e-100) throw CausticError("det Q = 0 (caustic)");

    // stationary exponent
    cplx phi{0.0, 0.0};
    const cplx i_over_h = cplx{0.0, 1.0} / hbar;
    for (int k = 0; k < 4; ++k)
        phi += i_over_h * (ing[k].action(kXi[k], hbar, j) + ing[k].g_correction);
    phi -= 4.0 * j * std::log((1.0 + std::norm(params.s0A)) * (1.0 + std::norm(params.s0B)));
    phi -= 2.0 * j * std::log(1.0 + finals[3].uA * finals[0].vA);
    phi -= 2.0 * j * std::log(1.0 + finals[1].uA * finals[2].vA);
    phi -= 2.0 * j * std::log(1.0 + finals[1].uB * finals[0].vB);
    phi -= 2.0 * j * std::log(1.0 + finals[3].uB * finals[2].vB);

    cplx pref{1.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        const cplx jac = (1.0 + finals[k].uA * finals[k].vA) * (1.0 + finals[k].uB * finals[k].vB);
        pref *= std::sqrt(d_pref[k]) / jac;
    }

    // ((2j)/(2 pi i))^4 * (2 pi)^4 / sqrt(det Q) = (2j)^4 / sqrt(det Q)
    const double measure = std::pow(2.0 * j, 4);
    return measure * pref * std::exp(phi) / std::sqrt(detQ);
}

quantum::EntropySeries semiclassical_entropy(const QuantumParams& params,
                                             const std::vector<double>& tau_grid,
                                             const saddle::RootRegistry& registry,
                                             const FilterPolicy& policy,
                                             std::vector<BranchSeries>* breakdown) {
    // map internal grid index -> requested output slot
    std::map<int, int> requested_slot;
    for (size_t i = 0; i < registry.requested_index.size(); ++i)
        requested_slot[registry.requested_index[i]] = static_cast<int>(i);
    if (registry.requested_index.size() != tau_grid.size())
        throw ConfigError("registry was swept over a different tau grid");

    const size_t n_out = tau_grid.size();
    std::vector<cplx> total(n_out, cplx{0.0, 0.0});
    std::vector<int> active(n_out, 0);

    // Each set's square-root branch is resolved independently at every output
    // point by continuation from the real saddle at the same time (the matrix
    // pencil above). Carrying the sign along tau instead fails across Stokes
    // transitions, where the correct branch jumps discontinuously.
    //
    // One pencil walk serves the whole symmetry family: the sets of 1/x and
    // x^* reproduce, respectively, the value and the conjugate value of x's
    // set (index relabeling 1<->3, 2<->4 and complex conjugation), which the
    // test suite asserts directly against contribution().
    for (const saddle::Branch& branch : registry.branches) {
        double prev_abs = 0.0;
        bool has_prev = false;
        double prev_tau = 0.0;

        BranchSeries series;
        series.branch_id = branch.id;

        for (const saddle::BranchSample& sample : branch.samples) {
            const auto slot = requested_slot.find(sample.grid_index);
            if (slot == requested_slot.end()) continue;  // internal-only point
            const double tau = registry.grid[sample.grid_index];
            const cplx T = params.tau_to_time(tau);

            // deduplicated symmetry images of this branch's root
            const cplx x = sample.x;
            const std::array<cplx, 4> images{x, std::conj(x), 1.0 / x, 1.0 / std::conj(x)};
            std::array<bool, 4> use{true, true, true, true};
            for (int i = 1; i < 4; ++i)
                for (int k = 0; k < i && use[i]; ++k)
                    if (use[k] && std::abs(images[i] - images[k]) < 1e-6) use[i] = false;
            int n_direct = (use[0] ? 1 : 0) + (use[2] ? 1 : 0);
            int n_conjugate = (use[1] ? 1 : 0) + (use[3] ? 1 : 0);

            cplx branch_value{0.0, 0.0};
            int branch_active = 0;
            std::string reason = sample.filtered ? sample.reason : "";

            if (!sample.filtered) {
                try {
                    const saddle::TrajectorySet set = saddle::assemble_set(x, params, T);
                    const SetGeometry geo = set_geometry(set, params);
                    const double magnitude =
                        std::sqrt(std::abs(geo.Afactor / geo.Fdet)) * std::exp(geo.phase.real());
                    if (magnitude < policy.negligible_abs) {
                        reason = "negligible: |value| below floor";
                        has_prev = false;
                    } else if (std::abs(geo.Fdet) < policy.min_det_F) {
                        reason = "caustic: |det F| below threshold";
                        has_prev = false;
                    } else {
                        cplx sqrt_detF;
                        const ComplexMatrix F_set = build_F_matrix(set, params);
                        const ComplexMatrix F_real = build_F_matrix(
                            saddle::assemble_set_raw(cplx{1.0, 0.0}, params, T), params);
                        if (!pencil_sqrt_detF(F_real, F_set, &sqrt_detF)) {
                            reason = "anchor: branch sign unresolved";
                            has_prev = false;
                        } else {
                            const cplx value = geo.sqrt_Afactor / sqrt_detF * std::exp(geo.phase);
                            if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
                                throw NumericError("value overflowed");
                            if (std::abs(value) > policy.max_abs)
                                reason = "magnitude: |value| above threshold";
                            else if (has_prev && tau > prev_tau && prev_abs >= policy.growth_floor &&
                                     (std::log(std::abs(value)) - std::log(prev_abs)) / (tau - prev_tau) >
                                         policy.max_growth_rate)
                                reason = "growth: |value| rising too fast";
                            branch_value = static_cast<double>(n_direct) * value +
                                           static_cast<double>(n_conjugate) * std::conj(value);
                            branch_active = n_direct + n_conjugate;
                            prev_abs = std::abs(value);
                            has_prev = prev_abs > 0.0;
                            prev_tau = tau;
                        }
                    }
                } catch (const NumericError&) {
                    reason = "inconsistent: set assembly or contribution failed";
                    has_prev = false;
                }
            }

            const bool excluded = sample.filtered || !reason.empty();
            if (!excluded) {
                total[slot->second] += branch_value;
                active[slot->second] += branch_active;
            }
            series.tau.push_back(tau);
            series.x1A.push_back(x);
            series.value.push_back(excluded ? cplx{0.0, 0.0} : branch_value);
            series.filtered_reason.push_back(reason);
        }
        if (breakdown && !series.tau.empty()) breakdown->push_back(std::move(series));
    }

    quantum::EntropySeries out;
    out.tau = tau_grid;
    out.semiclassical.reserve(n_out);
    out.sets_active = active;
    for (size_t i = 0; i < n_out; ++i) out.semiclassical.push_back(1.0 - total[i].real());
    return out;
}

} // namespace spinsemi::entropy
