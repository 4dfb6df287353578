#ifndef SPINSEMI_ENTROPY_HPP
#define SPINSEMI_ENTROPY_HPP

#include <complex>
#include <string>
#include <vector>

#include "spinsemi/complex_linalg.hpp"
#include "spinsemi/params.hpp"
#include "spinsemi/quantum.hpp"
#include "spinsemi/saddle.hpp"

namespace spinsemi::entropy {

using spinsemi::cplx;
using spinsemi::QuantumParams;
using linalg::ComplexMatrix;

// Exclusion rules for unphysical trajectory sets. A set is dropped from the
// sum at a given tau when its |value| exceeds max_abs, when d ln|value|/d tau
// between consecutive continuation steps exceeds max_growth_rate while the
// set is already of order the cap (above growth_floor; sets legitimately rise
// from tiny magnitudes at steep log-rates as they become relevant), when
// |det F| falls below min_det_F (caustic), or when |value| is below
// negligible_abs and cannot move the sum.
struct FilterPolicy {
    double max_abs = 1.5;
    double max_growth_rate = 10.0;
    double growth_floor = 0.75;
    double min_det_F = 1e-8;
    double negligible_abs = 1e-12;
};

// One trajectory set's term in the entropy sum:
//   value = sqrt(A / det F) * exp((i/hbar)[F1 - F2 + F3 - F4])
struct SetContribution {
    saddle::TrajectorySet set;
    cplx Fdet{1.0, 0.0};
    cplx Afactor{1.0, 0.0};
    cplx phase{0.0, 0.0};
    cplx value{1.0, 0.0};
    bool filtered = false;
    std::string reason;
};

// The 8x8 boundary-coupling matrix assembled from the four trajectories'
// stability blocks and the part selectors I_A = diag(1,0), I_B = diag(0,1).
ComplexMatrix build_F_matrix(const saddle::TrajectorySet& set, const QuantumParams& params);

// Evaluates one set's term. sqrt(A) is evaluated on its exact single-valued
// branch; the tracker carries the branch of sqrt(det F) between calls. On the
// tracker's first use the product starts on the principal root of A/det F.
// Forward ingredients (xi=+1) enter for trajectories 1 and 3, backward
// (xi=-1) for 2 and 4. Throws CausticError when det F is numerically zero.
SetContribution contribution(const saddle::TrajectorySet& set, const QuantumParams& params,
                             linalg::BranchTracker& tracker);

// Same quantity through the pre-simplification Gaussian route: the 8x8
// second-derivative matrix, the four prefactors D_k and the stationary
// exponent, combined with the leading-order (2j/(2 pi i))^4 measure weight.
// Algebraically identical to contribution().value; the overall sign is left
// on the principal branch (both routes are square roots of the same
// single-valued quantity, so they agree up to the continuation-resolved sign).
cplx purity_q_matrix(const saddle::TrajectorySet& set, const QuantumParams& params);

// Per-branch slice of the entropy sum on the requested tau grid; `value` is
// the branch's symmetry-image sets summed (real for intact conjugate pairs).
struct BranchSeries {
    int branch_id = 0;
    std::vector<double> tau;
    std::vector<cplx> x1A;
    std::vector<cplx> value;
    std::vector<std::string> filtered_reason;  // empty string when active
};

// S_sc(tau) = 1 - sum over unfiltered sets. The registry must have been swept
// over a refinement of tau_grid (see saddle::sweep_roots). At every output
// point each contributing set's square root is re-anchored through the matrix
// pencil from the real set, so the sum stays on the physical branch across
// Stokes transitions where continuation in tau would pick the wrong sheet.
quantum::EntropySeries semiclassical_entropy(const QuantumParams& params,
                                             const std::vector<double>& tau_grid,
                                             const saddle::RootRegistry& registry,
                                             const FilterPolicy& policy,
                                             std::vector<BranchSeries>* breakdown = nullptr);

} // namespace spinsemi::entropy

#endif
