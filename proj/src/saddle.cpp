#include "spinsemi/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace spinsemi::saddle {

namespace {

constexpr double kRootTol = 1e-10;       // acceptance residual
constexpr double kPoleClearance = 1e-4;  // discard roots this close to a pole
constexpr double kDedupRadius = 1e-6;

double q_of(const QuantumParams& params, Part part) {
    return std::norm(part == Part::A ? params.s0A : params.s0B);
}

bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// distance to the nearer exponent pole of either part
double pole_distance(cplx x, const QuantumParams& params) {
    double d = std::numeric_limits<double>::infinity();
    for (const Part part : {Part::A, Part::B}) {
        const double q = q_of(params, part);
        if (q == 0.0) continue;
        d = std::min(d, std::abs(x + q));
        d = std::min(d, std::abs(x + 1.0 / q));
    }
    return d;
}

cplx canonicalize(cplx x) {
    if (std::abs(x) > 1.0 + 1e-12) x = 1.0 / x;
    if (x.imag() < 0.0) x = std::conj(x);
    return x;
}

} // namespace

cplx f_map(cplx x, Part part, const QuantumParams& params, cplx T) {
    const double q = q_of(params, part);
    const cplx d1 = 1.0 + q * x;
    const cplx d2 = x + q;
    if (std::abs(d1) < 1e-12 || std::abs(d2) < 1e-12)
        throw SingularityError("f_map evaluated at an exponent pole");
    const cplx exponent =
        cplx{0.0, -2.0} * params.j * params.lambda * q * T * (x * x - 1.0) / (d1 * d2);
    return std::exp(exponent);
}

cplx f_map_derivative(cplx x, Part part, const QuantumParams& params, cplx T) {
    const double q = q_of(params, part);
    const cplx d1 = 1.0 + q * x;
    const cplx d2 = x + q;
    if (std::abs(d1) < 1e-12 || std::abs(d2) < 1e-12)
        throw SingularityError("f_map_derivative evaluated at an exponent pole");
    const cplx num = x * x - 1.0;
    const cplx den = d1 * d2;
    const cplx dnum = 2.0 * x;
    const cplx dden = 2.0 * q * x + (1.0 + q * q);
    const cplx dratio = (dnum * den - num * dden) / (den * den);
    const cplx prefactor = cplx{0.0, -2.0} * params.j * params.lambda * q * T;
    return f_map(x, part, params, T) * prefactor * dratio;
}

cplx transcendental_residual(cplx x1A, const QuantumParams& params, cplx T) {
    return f_map(f_map(x1A, Part::A, params, T), Part::B, params, T) - x1A;
}

cplx newton_refine(cplx seed, const QuantumParams& params, cplx T, bool* converged,
                   int max_iter) {
    cplx x = seed;
    *converged = false;
    double best = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        cplx f;
        try {
            f = transcendental_residual(x, params, T);
        } catch (const SingularityError&) {
            return x;
        }
        if (!is_finite(f)) return x;
        // polish to the roundoff floor so symmetry images stay sharp
        if (std::abs(f) < 1e-14) break;
        if (std::abs(f) < 1e-12 && std::abs(f) >= best) break;
        best = std::min(best, std::abs(f));
        const double h = 1e-7 * std::max(1.0, std::abs(x));
        cplx fp, fm;
        try {
            fp = transcendental_residual(x + h, params, T);
            fm = transcendental_residual(x - h, params, T);
        } catch (const SingularityError&) {
            return x;
        }
        const cplx deriv = (fp - fm) / (2.0 * h);
        if (!is_finite(deriv) || std::abs(deriv) < 1e-300) return x;
        const cplx step = f / deriv;
        x -= step;
        if (!is_finite(x) || std::abs(x) > 1e8) return x;
    }
    try {
        *converged = std::abs(transcendental_residual(x, params, T)) < kRootTol;
    } catch (const SingularityError&) {
        *converged = false;
    }
    return x;
}

std::vector<RootRecord> scan_roots(const QuantumParams& params, cplx tau, const AnnulusGrid& grid) {
    const cplx T = params.tau_to_time(tau);
    std::vector<RootRecord> records;
    records.push_back(RootRecord{cplx{1.0, 0.0}, tau, -1, RootOrigin::RealRoot, false, ""});

    const int nr = grid.n_radial;
    const int na = grid.n_angular;
    const double log_rmin = std::log(grid.r_min);
    const double log_rmax = std::log(grid.r_max);

    // node values, NaN where the map cannot be evaluated
    std::vector<cplx> values(static_cast<size_t>(nr + 1) * (na + 1));
    std::vector<cplx> nodes(values.size());
    for (int i = 0; i <= nr; ++i) {
        const double r = std::exp(log_rmin + (log_rmax - log_rmin) * i / nr);
        for (int k = 0; k <= na; ++k) {
            const double theta = std::numbers::pi * k / na;
            const cplx x = std::polar(r, theta);
            const size_t idx = static_cast<size_t>(i) * (na + 1) + k;
            nodes[idx] = x;
            try {
                values[idx] = transcendental_residual(x, params, T);
            } catch (const SingularityError&) {
                values[idx] = cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
            }
        }
    }

    std::vector<cplx> accepted{cplx{1.0, 0.0}};
    auto already_known = [&](cplx x) {
        for (const cplx& r : accepted)
            if (std::abs(x - r) < kDedupRadius) return true;
        return false;
    };

    for (int i = 0; i < nr; ++i) {
        for (int k = 0; k < na; ++k) {
            const cplx c00 = values[static_cast<size_t>(i) * (na + 1) + k];
            const cplx c01 = values[static_cast<size_t>(i) * (na + 1) + k + 1];
            const cplx c10 = values[static_cast<size_t>(i + 1) * (na + 1) + k];
            const cplx c11 = values[static_cast<size_t>(i + 1) * (na + 1) + k + 1];
            if (!is_finite(c00) || !is_finite(c01) || !is_finite(c10) || !is_finite(c11)) continue;

            auto sign_change = [](double a, double b, double c, double d) {
                const double lo = std::min(std::min(a, b), std::min(c, d));
                const double hi = std::max(std::max(a, b), std::max(c, d));
                return lo <= 0.0 && hi >= 0.0;
            };
            if (!sign_change(c00.real(), c01.real(), c10.real(), c11.real())) continue;
            if (!sign_change(c00.imag(), c01.imag(), c10.imag(), c11.imag())) continue;

            const cplx seed = 0.25 * (nodes[static_cast<size_t>(i) * (na + 1) + k] +
                                      nodes[static_cast<size_t>(i) * (na + 1) + k + 1] +
                                      nodes[static_cast<size_t>(i + 1) * (na + 1) + k] +
                                      nodes[static_cast<size_t>(i + 1) * (na + 1) + k + 1]);
            bool converged = false;
            cplx root = newton_refine(seed, params, T, &converged);
            if (!converged) continue;  // discarded seed, not fatal

            root = canonicalize(root);
            if (std::abs(root) < grid.r_min || std::abs(root) > 1.0 + 1e-12) continue;
            if (pole_distance(root, params) < kPoleClearance) continue;
            if (already_known(root)) continue;
            // a root is accepted only when its whole symmetry family verifies
            // at working precision (residuals on the natural scale max(1,|x|));
            // clusters too dense to localize in doubles drop out here
            try {
                bool family_ok = true;
                for (const cplx image : symmetry_images(root))
                    if (std::abs(transcendental_residual(image, params, T)) >
                        kRootTol * std::max(1.0, std::abs(image))) {
                        family_ok = false;
                        break;
                    }
                if (!family_ok) continue;
            } catch (const SingularityError&) {
                continue;
            }
            accepted.push_back(root);
            records.push_back(RootRecord{root, tau, -1, RootOrigin::GridScan, false, ""});
        }
    }

    std::sort(records.begin() + 1, records.end(), [](const RootRecord& a, const RootRecord& b) {
        if (a.x1A.real() != b.x1A.real()) return a.x1A.real() < b.x1A.real();
        return a.x1A.imag() < b.x1A.imag();
    });
    return records;
}

std::vector<RootRecord> continue_roots(const std::vector<RootRecord>& records,
                                       const QuantumParams& params, cplx tau_next) {
    const cplx T = params.tau_to_time(tau_next);
    std::vector<RootRecord> out;
    out.reserve(records.size());
    for (const RootRecord& rec : records) {
        RootRecord next = rec;
        next.tau = tau_next;
        if (rec.filtered) {
            out.push_back(next);
            continue;
        }
        if (rec.origin == RootOrigin::RealRoot || std::abs(rec.x1A - 1.0) < 1e-14) {
            next.x1A = cplx{1.0, 0.0};  // exact root for every T
            out.push_back(next);
            continue;
        }
        bool converged = false;
        const cplx root = newton_refine(rec.x1A, params, T, &converged);
        if (!converged) {
            next.filtered = true;
            next.filter_reason = "lost: Newton diverged";
        } else if (pole_distance(root, params) < kPoleClearance) {
            next.filtered = true;
            next.filter_reason = "pole: entered pole disk";
            next.x1A = root;
        } else {
            next.x1A = root;
            next.origin = RootOrigin::Continuation;
        }
        out.push_back(next);
    }
    return out;
}

std::vector<cplx> symmetry_images(cplx x, double dedup_radius) {
    if (std::abs(x) < 1e-12) throw ConfigError("x = 0 has no symmetry images (pole of inversion)");
    const std::array<cplx, 4> candidates{x, std::conj(x), 1.0 / x, 1.0 / std::conj(x)};
    std::vector<cplx> images;
    for (const cplx& c : candidates) {
        bool dup = false;
        for (const cplx& seen : images)
            if (std::abs(c - seen) < dedup_radius) {
                dup = true;
                break;
            }
        if (!dup) images.push_back(c);
    }
    return images;
}

std::vector<RootRecord> expand_symmetry(const RootRecord& record) {
    std::vector<RootRecord> out;
    bool first = true;
    for (const cplx& image : symmetry_images(record.x1A)) {
        RootRecord rec = record;
        rec.x1A = image;
        if (!first) rec.origin = RootOrigin::SymmetryImage;
        first = false;
        out.push_back(rec);
    }
    return out;
}

TrajectorySet assemble_set_raw(cplx x1A, const QuantumParams& params, cplx T) {
    if (std::abs(x1A) < 1e-12) throw ConfigError("assemble_set: x1A = 0");
    const cplx x1B = f_map(x1A, Part::A, params, T);
    const cplx x2A = 1.0 / x1A, x3A = 1.0 / x1A, x4A = x1A;
    const cplx x2B = x1B, x3B = 1.0 / x1B, x4B = 1.0 / x1B;

    const cplx s0A = params.s0A, s0B = params.s0B;
    const cplx cA = std::conj(s0A), cB = std::conj(s0B);

    using classical::PhasePoint;
    TrajectorySet set;
    set.x1A = x1A;
    set.x1B = x1B;
    set.traj[0] = classical::make_trajectory(PhasePoint{s0A, s0B, x1A * cA, x1B * cB}, params, T);
    set.traj[1] = classical::make_trajectory(PhasePoint{x2A * s0A, x2B * s0B, cA, cB}, params, T);
    set.traj[2] = classical::make_trajectory(PhasePoint{s0A, s0B, x3A * cA, x3B * cB}, params, T);
    set.traj[3] = classical::make_trajectory(PhasePoint{x4A * s0A, x4B * s0B, cA, cB}, params, T);
    return set;
}

TrajectorySet assemble_set(cplx x1A, const QuantumParams& params, cplx T) {
    TrajectorySet set = assemble_set_raw(x1A, params, T);

    const classical::PhasePoint f1 = set.traj[0].final_point();
    const classical::PhasePoint f2 = set.traj[1].final_point();
    const classical::PhasePoint f3 = set.traj[2].final_point();
    const classical::PhasePoint f4 = set.traj[3].final_point();

    auto rel = [](cplx a, cplx b) {
        return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
    };
    double residual = 0.0;
    residual = std::max(residual, rel(f1.vA, f4.vA));
    residual = std::max(residual, rel(f1.vB, f2.vB));
    residual = std::max(residual, rel(f2.uA, f3.uA));
    residual = std::max(residual, rel(f2.uB, f1.uB));
    residual = std::max(residual, rel(f3.vA, f2.vA));
    residual = std::max(residual, rel(f3.vB, f4.vB));
    residual = std::max(residual, rel(f4.uA, f1.uA));
    residual = std::max(residual, rel(f4.uB, f3.uB));
    set.residual = residual;
    if (!(residual < 1e-8))  // non-finite residual (overflowed endpoints) fails too
        throw NumericError("assemble_set: final boundary conditions violated (residual " +
                           std::to_string(residual) + ")");
    return set;
}

TrajectorySet assemble_set(const RootRecord& record, const QuantumParams& params, cplx T) {
    return assemble_set(record.x1A, params, T);
}

namespace {

// nearest distance between a candidate root and any symmetry image of x
double image_distance(cplx candidate, cplx x) {
    double d = std::numeric_limits<double>::infinity();
    if (std::abs(x) < 1e-12) return d;
    for (const cplx& image :
         {x, std::conj(x), cplx{1.0, 0.0} / x, cplx{1.0, 0.0} / std::conj(x)})
        d = std::min(d, std::abs(candidate - image));
    return d;
}

} // namespace

RootRegistry sweep_roots(const QuantumParams& params, const std::vector<double>& tau_grid,
                         const SweepOptions& options) {
    if (tau_grid.empty()) throw ConfigError("sweep_roots: empty tau grid");
    for (size_t i = 1; i < tau_grid.size(); ++i)
        if (tau_grid[i] <= tau_grid[i - 1]) throw ConfigError("sweep_roots: tau grid not increasing");

    RootRegistry registry;
    // refine the requested grid to the continuation step
    registry.requested_index.reserve(tau_grid.size());
    registry.grid.push_back(tau_grid.front());
    registry.requested_index.push_back(0);
    for (size_t i = 1; i < tau_grid.size(); ++i) {
        const double a = tau_grid[i - 1];
        const double b = tau_grid[i];
        const int substeps = std::max(1, static_cast<int>(std::ceil((b - a) / options.continuation_step - 1e-12)));
        for (int s = 1; s <= substeps; ++s) registry.grid.push_back(a + (b - a) * s / substeps);
        registry.requested_index.push_back(static_cast<int>(registry.grid.size()) - 1);
    }

    int next_branch_id = 0;
    std::vector<int> live;  // indices into registry.branches with a sample at the previous step

    auto add_branch = [&](cplx x, RootOrigin origin, int grid_index) {
        Branch branch;
        branch.id = next_branch_id++;
        branch.origin = origin;
        branch.samples.push_back(BranchSample{grid_index, x, false, ""});
        registry.branches.push_back(std::move(branch));
        live.push_back(static_cast<int>(registry.branches.size()) - 1);
    };

    // A freshly scanned root either coincides (up to the dedup radius) with a
    // root some live branch already tracks -- possibly as one of its symmetry
    // images -- or it is new and seeds a branch. Branch identity between tau
    // steps comes solely from each branch's own Newton path (with the jump
    // guard below), so scans never reassign ids.
    auto scan_and_merge = [&](double tau, int grid_index) {
        const std::vector<RootRecord> found = scan_roots(params, tau, options.grid);
        for (const RootRecord& rec : found) {
            if (rec.origin == RootOrigin::RealRoot) continue;  // tracked separately
            double best = std::numeric_limits<double>::infinity();
            for (const int bi : live) {
                const Branch& branch = registry.branches[bi];
                if (branch.samples.back().grid_index != grid_index) continue;
                best = std::min(best, image_distance(rec.x1A, branch.samples.back().x));
            }
            if (best < kDedupRadius) continue;  // already tracked
            add_branch(rec.x1A, RootOrigin::GridScan, grid_index);
        }
    };

    // seed at the first grid point
    add_branch(cplx{1.0, 0.0}, RootOrigin::RealRoot, 0);
    if (!options.real_only) scan_and_merge(registry.grid.front(), 0);
    double last_scan_tau = registry.grid.front();

    for (int gi = 1; gi < static_cast<int>(registry.grid.size()); ++gi) {
        const double tau = registry.grid[gi];
        const cplx T = params.tau_to_time(tau);

        std::vector<int> still_live;
        for (const int bi : live) {
            Branch& branch = registry.branches[bi];
            const BranchSample& prev = branch.samples.back();
            if (prev.grid_index != gi - 1) continue;  // already lost earlier

            if (branch.origin == RootOrigin::RealRoot) {
                branch.samples.push_back(BranchSample{gi, cplx{1.0, 0.0}, false, ""});
                still_live.push_back(bi);
                continue;
            }
            bool converged = false;
            const cplx root = newton_refine(prev.x, params, T, &converged);
            if (!converged) {
                branch.samples.push_back(BranchSample{gi, prev.x, true, "lost: Newton diverged"});
                continue;
            }
            if (std::abs(root) < options.window_min_abs || std::abs(root) > 1.0 / options.window_min_abs) {
                branch.samples.push_back(BranchSample{gi, root, true, "window: left search region"});
                continue;
            }
            if (pole_distance(root, params) < kPoleClearance) {
                branch.samples.push_back(BranchSample{gi, root, true, "pole: entered pole disk"});
                continue;
            }
            if (std::abs(root - prev.x) > 0.05) {
                branch.samples.push_back(BranchSample{gi, root, true, "jump: identity not preserved"});
                continue;
            }
            branch.samples.push_back(BranchSample{gi, root, false, ""});
            still_live.push_back(bi);
        }

        // merge branches that collapsed onto the same root family (up to
        // symmetry images); the older id wins
        for (size_t a = 0; a < still_live.size(); ++a) {
            Branch& ba = registry.branches[still_live[a]];
            if (ba.samples.back().filtered) continue;
            for (size_t b = a + 1; b < still_live.size(); ++b) {
                Branch& bb = registry.branches[still_live[b]];
                if (bb.samples.back().filtered) continue;
                if (image_distance(bb.samples.back().x, ba.samples.back().x) < kDedupRadius)
                    bb.samples.back() = BranchSample{gi, bb.samples.back().x, true, "merged into branch " +
                                                                                        std::to_string(ba.id)};
            }
        }
        std::vector<int> survivors;
        for (const int bi : still_live)
            if (!registry.branches[bi].samples.back().filtered) survivors.push_back(bi);
        live = survivors;

        if (!options.real_only && tau - last_scan_tau >= options.scan_interval - 1e-12) {
            scan_and_merge(tau, gi);
            last_scan_tau = tau;
        }
    }

    return registry;
}

} // namespace spinsemi::saddle
