#ifndef SPINSEMI_SADDLE_HPP
#define SPINSEMI_SADDLE_HPP

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "spinsemi/classical.hpp"
#include "spinsemi/params.hpp"

namespace spinsemi::saddle {

using spinsemi::cplx;
using spinsemi::QuantumParams;

enum class Part { A, B };

// f_A(x) = exp[-2 i j lambda |s0A|^2 T (x^2-1) / ((1+|s0A|^2 x)(x+|s0A|^2))]
// (and the same with |s0B|^2 for part B). Throws SingularityError at the
// poles of the exponent, x = -|s0|^2 and x = -1/|s0|^2.
cplx f_map(cplx x, Part part, const QuantumParams& params, cplx T);

// d f / d x, analytic (used only to validate the differenced Newton step)
cplx f_map_derivative(cplx x, Part part, const QuantumParams& params, cplx T);

// f(x) = f_B(f_A(x)) - x; roots select the contributing trajectory sets
cplx transcendental_residual(cplx x1A, const QuantumParams& params, cplx T);

// Newton iteration on the transcendental residual with a central-difference
// derivative. Returns the refined root; *converged reports |f| < 1e-10.
cplx newton_refine(cplx seed, const QuantumParams& params, cplx T, bool* converged,
                   int max_iter = 50);

enum class RootOrigin { RealRoot, GridScan, Continuation, SymmetryImage };

struct RootRecord {
    cplx x1A{1.0, 0.0};
    cplx tau{0.0, 0.0};  // dimensionless time; complex values allowed
    int branch_id = -1;
    RootOrigin origin = RootOrigin::RealRoot;
    bool filtered = false;
    std::string filter_reason;
};

// log-polar search window: r in [r_min, r_max], angle in [0, pi]
struct AnnulusGrid {
    double r_min = 1e-3;
    double r_max = 1.0;
    int n_radial = 600;
    int n_angular = 600;
};

// Samples Re f and Im f on the annulus grid; cells where both change sign
// seed Newton iterations. Converged roots are mapped into the fundamental
// domain {|x| <= 1, Im x >= 0}, deduplicated (radius 1e-6), stripped of
// points within 1e-4 of the exponent poles, and always include x = 1.
std::vector<RootRecord> scan_roots(const QuantumParams& params, cplx tau, const AnnulusGrid& grid);

// One continuation step: Newton from each unfiltered record's root at the new
// tau. Divergence marks the record lost; leaving the numerical window or
// hitting a pole disk marks it filtered with a reason. x = 1 is kept exact.
std::vector<RootRecord> continue_roots(const std::vector<RootRecord>& records,
                                       const QuantumParams& params, cplx tau_next);

// {r, r*, 1/r, 1/r*} deduplicated; fewer images on the real axis / unit circle
std::vector<cplx> symmetry_images(cplx x, double dedup_radius = 1e-6);
std::vector<RootRecord> expand_symmetry(const RootRecord& record);

// Four entangled-boundary-condition trajectories built from one root.
// Initial conditions are exact by construction; `residual` is the largest
// relative violation of the eight final-point matching conditions.
struct TrajectorySet {
    std::array<classical::AnalyticTrajectory, 4> traj;
    cplx x1A{1.0, 0.0};
    cplx x1B{1.0, 0.0};
    double residual = 0.0;
};

TrajectorySet assemble_set(cplx x1A, const QuantumParams& params, cplx T);
TrajectorySet assemble_set(const RootRecord& record, const QuantumParams& params, cplx T);

// Same construction without the boundary-condition check: valid for any x1A,
// not only roots. Used to follow quantities like det F along paths in the
// x-plane / tau-plane between roots.
TrajectorySet assemble_set_raw(cplx x1A, const QuantumParams& params, cplx T);

// ---- tau-sweep root registry ------------------------------------------------

struct BranchSample {
    int grid_index = 0;  // index into RootRegistry::grid
    cplx x{0.0, 0.0};
    bool filtered = false;
    std::string reason;
};

struct Branch {
    int id = 0;
    RootOrigin origin = RootOrigin::GridScan;
    std::vector<BranchSample> samples;  // consecutive grid indices until lost
};

struct SweepOptions {
    double continuation_step = 1e-3;
    double scan_interval = 0.02;
    AnnulusGrid grid;
    bool real_only = false;       // track only the x = 1 branch
    double window_min_abs = 1e-4; // leaving |x| < this marks the branch filtered
};

// Internal tau grid (the requested grid refined to the continuation step)
// plus all branches tracked across it. Branch ids are stable and assigned in
// deterministic order.
struct RootRegistry {
    std::vector<double> grid;
    std::vector<int> requested_index;  // positions of the caller's tau points in `grid`
    std::vector<Branch> branches;
};

RootRegistry sweep_roots(const QuantumParams& params, const std::vector<double>& tau_grid,
                         const SweepOptions& options);

} // namespace spinsemi::saddle

#endif
