#include "kronmde/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "kronmde/parallel.hpp"

namespace kronmde {

namespace {

// Scans solve the reduced problem when the data allows it; rho and the growth
// statistic are invariant under the reduction (equal group sizes).
const HermitianDysonData& scan_data(const HermitianDysonData& full,
                                    std::optional<UniformReduction>& hold,
                                    bool allow) {
    if (allow) {
        hold = reduce_uniform(full);
        if (hold) return hold->reduced;
    }
    return full;
}

struct DescentOutcome {
    bool in = false;            // growth crossed in_threshold (any rung)
    bool aux = false;           // growth crossed aux_threshold (any rung or floor)
    bool unknown = false;       // floor solve failed and nothing crossed
    double growth_floor = 0;
};

// Descend to the eta floor at fixed E, classifying against one or two growth
// thresholds.  Crossing at any rung settles a threshold to "true" because the
// growth statistic is a Stieltjes average that only grows as eta decreases;
// "false" requires reaching the floor.
DescentOutcome classify_descent(const HermitianDysonData& d, double E,
                                double in_threshold, double aux_threshold,
                                const ScanOptions& opts) {
    DescentOutcome out;
    const double stop_at = std::max(in_threshold, aux_threshold);
    std::function<bool(const MdeSolution&)> stop = [&](const MdeSolution& sol) {
        const double g = growth_of(sol);
        if (g >= in_threshold) out.in = true;
        if (g >= aux_threshold) out.aux = true;
        return g >= stop_at;
    };
    ContinuationResult res =
        solve_continuation(d, E, {opts.eta_floor}, opts.solver, &stop);
    if (res.stopped_early) return out;
    const MdeSolution& floor_sol = res.at_targets.back();
    if (!floor_sol.converged) {
        if (!(out.in && out.aux)) out.unknown = true;
        return out;
    }
    out.growth_floor = growth_of(floor_sol);
    if (out.growth_floor >= in_threshold) out.in = true;
    if (out.growth_floor >= aux_threshold) out.aux = true;
    return out;
}

struct PointResult {
    double dist0 = std::numeric_limits<double>::infinity();
    bool member = false, member_tilde = false, unknown = false;
};

// One pseudospectrum grid point: E = 0 handles both the dist0 seed and the
// imaginary-axis (tilde) membership in a single descent, then the positive
// lattice E are classified until the first IN.
PointResult evaluate_point(const KroneckerModel& model, cx zeta, double epsilon,
                           double tilde_threshold, const ScanOptions& opts) {
    PointResult r;
    const double step = opts.step > 0 ? opts.step : epsilon / 4;
    HermitianDysonData full = hermitize(model, zeta);
    std::optional<UniformReduction> hold;
    const HermitianDysonData& d = scan_data(full, hold, opts.allow_reduction);

    DescentOutcome at0 = classify_descent(d, 0.0, opts.growth_threshold,
                                          tilde_threshold, opts);
    r.member_tilde = at0.aux;
    if (at0.unknown) {
        r.unknown = true;
        r.dist0 = 0;  // conservative: counted as member
        r.member = true;
        r.member_tilde = true;
        return r;
    }
    if (at0.in) {
        r.dist0 = 0;
        r.member = true;
        return r;
    }
    const double cap = epsilon + step * 1.000001;
    for (int k = 1; k * step <= cap; ++k) {
        const double E = k * step;
        DescentOutcome at = classify_descent(d, E, opts.growth_threshold,
                                             opts.growth_threshold, opts);
        if (at.unknown) {
            r.unknown = true;
            r.dist0 = E;
            r.member = E <= epsilon;
            if (!r.member) { r.dist0 = 0; r.member = true; }  // stay conservative
            return r;
        }
        if (at.in) {
            r.dist0 = E;
            r.member = E <= epsilon;
            return r;
        }
    }
    return r;
}

PseudospectrumGrid run_grid(const KroneckerModel& model, const GridSpec& grid,
                            double epsilon, double tilde_threshold,
                            const ScanOptions& opts) {
    if (grid.size() <= 0) throw ContractError("pseudospectrum: empty grid");
    if (epsilon <= 0) throw ContractError("pseudospectrum: epsilon must be > 0");
    PseudospectrumGrid out;
    out.grid = grid;
    out.epsilon = epsilon;
    out.eta_floor = opts.eta_floor;
    out.growth_threshold = opts.growth_threshold;
    out.tilde_threshold = tilde_threshold;
    const int n = grid.size();
    out.dist0.assign(n, 0);
    out.member.assign(n, 0);
    out.member_tilde.assign(n, 0);
    out.unknown.assign(n, 0);
    parallel_for(n, opts.threads, [&](int p) {
        PointResult r = evaluate_point(model, grid.at(p), epsilon,
                                       tilde_threshold, opts);
        out.dist0[p] = r.dist0;
        out.member[p] = r.member;
        out.member_tilde[p] = r.member_tilde;
        out.unknown[p] = r.unknown;
    });
    return out;
}

}  // namespace

double rho_at(const HermitianDysonData& data, cx z, const ScanOptions& opts) {
    if (z.imag() <= 0) throw ContractError("rho_at: Im z must be > 0");
    std::optional<UniformReduction> hold;
    const HermitianDysonData& d = scan_data(data, hold, opts.allow_reduction);
    std::vector<double> target{z.imag()};
    SolverOptions so = opts.solver;
    ContinuationResult res = solve_continuation(d, z.real(), target, so);
    const MdeSolution& sol = res.at_targets.front();
    if (!sol.converged) throw ContractError("rho_at: solver did not converge");
    return rho_of(sol);
}

DosCurve dos_curve(const HermitianDysonData& data, double e_min, double e_max,
                   int points, double eta, const ScanOptions& opts) {
    if (points < 1 || e_max < e_min) throw ContractError("dos_curve: bad grid");
    if (eta <= 0) throw ContractError("dos_curve: eta must be > 0");
    std::optional<UniformReduction> hold;
    const HermitianDysonData& d = scan_data(data, hold, opts.allow_reduction);

    DosCurve curve;
    curve.eta = eta;
    curve.E_grid.resize(points);
    curve.rho.assign(points, std::numeric_limits<double>::quiet_NaN());
    curve.max_im_over_eta.assign(points, std::numeric_limits<double>::quiet_NaN());
    curve.dist_certificates.assign(points, std::numeric_limits<double>::quiet_NaN());

    SolverOptions so = opts.solver;
    bool warm = false;
    BlockVector prev;
    for (int i = 0; i < points; ++i) {
        const double E =
            points > 1 ? e_min + (e_max - e_min) * i / (points - 1) : e_min;
        curve.E_grid[i] = E;
        MdeSolution sol;
        if (warm) {
            SolverOptions w = so;
            w.init = InitKind::Given;
            w.init_given = prev;
            sol = solve_at(d, cx(E, eta), w);
        }
        if (!warm || !sol.converged) {
            ContinuationResult res = solve_continuation(d, E, {eta}, so);
            sol = res.at_targets.front();
        }
        if (!sol.converged) {
            curve.any_failed = true;
            warm = false;
            continue;
        }
        prev = sol.m;
        warm = true;
        curve.rho[i] = rho_of(sol);
        curve.max_im_over_eta[i] = growth_of(sol);
        if (curve.rho[i] > 0)
            curve.dist_certificates[i] = std::sqrt(eta / (M_PI * curve.rho[i]));
    }
    return curve;
}

std::pair<double, double> support_bracket(const HermitianDysonData& data) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& a : data.a) {
        if (!is_hermitian(a, 1e-12))
            throw ContractError("support_bracket: a_j must be Hermitian");
        Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues().minCoeff());
        hi = std::max(hi, es.eigenvalues().maxCoeff());
    }
    const double w = 2.0 * std::sqrt(norm_self_energy_max(data));
    return {lo - w, hi + w};
}

SupportEstimate estimate_support(const HermitianDysonData& data, double e_min,
                                 double e_max, double step,
                                 const ScanOptions& opts) {
    if (step <= 0 || e_max < e_min) throw ContractError("estimate_support: bad grid");
    std::optional<UniformReduction> hold;
    const HermitianDysonData& d = scan_data(data, hold, opts.allow_reduction);

    SupportEstimate est;
    est.eta_floor = opts.eta_floor;
    est.bracket = support_bracket(data);

    const int n = static_cast<int>(std::floor((e_max - e_min) / step + 1e-9)) + 1;
    std::vector<uint8_t> in(n, 0);
    bool warm = false;
    BlockVector prev;
    for (int i = 0; i < n; ++i) {
        const double E = e_min + i * step;
        if (E < est.bracket.first - step || E > est.bracket.second + step) {
            warm = false;
            continue;  // outside the bracket: provably out
        }
        MdeSolution sol;
        bool solved = false;
        if (warm) {
            SolverOptions w = opts.solver;
            w.init = InitKind::Given;
            w.init_given = prev;
            sol = solve_at(d, cx(E, opts.eta_floor), w);
            solved = sol.converged;
        }
        if (!solved) {
            DescentOutcome out = classify_descent(d, E, opts.growth_threshold,
                                                  opts.growth_threshold, opts);
            in[i] = out.in || out.unknown;  // unknown counts as in
            warm = false;
            continue;
        }
        prev = sol.m;
        warm = true;
        in[i] = growth_of(sol) >= opts.growth_threshold;
    }

    // merge runs of IN points, widen by one grid step, clip to the bracket
    for (int i = 0; i < n;) {
        if (!in[i]) { ++i; continue; }
        int j = i;
        while (j + 1 < n && in[j + 1]) ++j;
        double lo = std::max(est.bracket.first, e_min + i * step - step);
        double hi = std::min(est.bracket.second, e_min + j * step + step);
        if (!est.intervals.empty() && lo <= est.intervals.back().second) {
            est.intervals.back().second = hi;
        } else {
            est.intervals.emplace_back(lo, hi);
        }
        i = j + 1;
    }
    return est;
}

double dist0_selfconsistent(const KroneckerModel& model, cx zeta, double epsilon,
                            const ScanOptions& opts) {
    if (epsilon <= 0) throw ContractError("dist0_selfconsistent: epsilon must be > 0");
    PointResult r = evaluate_point(model, zeta, epsilon, 1.0 / epsilon, opts);
    return r.dist0;
}

PseudospectrumGrid pseudospectrum(const KroneckerModel& model, const GridSpec& grid,
                                  double epsilon, const ScanOptions& opts) {
    return run_grid(model, grid, epsilon, 1.0 / epsilon, opts);
}

bool example_oracle(const std::vector<cx>& zeta_points, double L, cx zeta) {
    double sum = 0;
    for (cx zi : zeta_points) {
        const double d2 = std::norm(zi - zeta);
        if (d2 == 0) return true;  // pole: inside
        sum += 1.0 / d2;
    }
    return sum >= L;
}

bool oracle_boundary_within(const std::vector<cx>& zeta_points, double L, cx zeta,
                            double dist) {
    const bool center = example_oracle(zeta_points, L, zeta);
    for (int ring = 1; ring <= 4; ++ring) {
        const double r = dist * ring / 4.0;
        for (int a = 0; a < 48; ++a) {
            const double th = 2.0 * M_PI * a / 48;
            if (example_oracle(zeta_points, L,
                               zeta + cx(r * std::cos(th), r * std::sin(th))) != center)
                return true;
        }
    }
    return false;
}

TildeReport check_tilde_inclusion(const KroneckerModel& model, const GridSpec& grid,
                                  double epsilon, const ScanOptions& opts) {
    TildeReport rep;
    // member at sqrt(eps) needs the dist0 scan capped at sqrt(eps); tilde is
    // evaluated against 1/eps on the same descent
    rep.scan = run_grid(model, grid, std::sqrt(epsilon), 1.0 / epsilon, opts);
    const auto& g = rep.scan;
    auto member_at = [&](int ix, int iy) {
        ix = std::clamp(ix, 0, grid.nre - 1);
        iy = std::clamp(iy, 0, grid.nim - 1);
        return g.member[iy * grid.nre + ix] != 0;
    };
    for (int iy = 0; iy < grid.nim; ++iy)
        for (int ix = 0; ix < grid.nre; ++ix) {
            const int p = iy * grid.nre + ix;
            if (!(g.member_tilde[p] && !g.member[p])) continue;
            const bool me = member_at(ix, iy);
            const bool boundary = member_at(ix - 1, iy) != me ||
                                  member_at(ix + 1, iy) != me ||
                                  member_at(ix, iy - 1) != me ||
                                  member_at(ix, iy + 1) != me;
            rep.violation_indices.push_back(p);
            if (boundary)
                rep.boundary_violations++;
            else
                rep.interior_violations++;
        }
    return rep;
}

}  // namespace kronmde
