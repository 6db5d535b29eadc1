#pragma once
#include <functional>

#include "kronmde/self_energy.hpp"

namespace kronmde {

enum class InitKind { Auto, Given };

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 50000;
    double damping_init = 0.5;
    bool damping_adapt = true;
    double eta_start = 8.0;   // continuation ladder start
    double eta_ratio = 0.7;   // geometric descent factor
    InitKind init = InitKind::Auto;
    BlockVector init_given;
};

struct MdeSolution {
    cx z{0, 0};
    BlockVector m;
    // max_j spectral norm of Id + (z Id - a_j + S_j[m]) m_j
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    double min_im_eig = 0;
};

// One damped iterate: m' = (1-damping) m + damping (-(z - a + S[m])^{-1}).
BlockVector fixed_point_step(const HermitianDysonData& data, cx z,
                             const BlockVector& m, double damping);

// Damped fixed-point solve at one spectral parameter.  Never throws on
// numerical failure: a non-converged result carries converged = false and the
// final residual.  Im z must be positive.
MdeSolution solve_at(const HermitianDysonData& data, cx z,
                     const SolverOptions& opts = {});

struct ContinuationResult {
    std::vector<MdeSolution> at_targets;  // aligned with eta_targets
    bool stopped_early = false;
    // smallest eta where the ladder still converged (inf if none)
    double last_converged_eta = std::numeric_limits<double>::infinity();
};

// Warm-started descent in Im z at fixed Re z = E: the ladder starts at
// max(opts.eta_start, eta_targets.front()), descends geometrically by
// opts.eta_ratio and lands exactly on each requested target.  early_stop (if
// given) is evaluated on every converged rung; returning true abandons the
// descent (ContinuationResult.stopped_early).
ContinuationResult solve_continuation(
    const HermitianDysonData& data, double E,
    const std::vector<double>& eta_targets, const SolverOptions& opts = {},
    const std::function<bool(const MdeSolution&)>* early_stop = nullptr);

// rho(z) = <Im M(z)> / pi
double rho_of(const MdeSolution& sol);

// max_j || Im m_j || / eta, the membership growth statistic
double growth_of(const MdeSolution& sol);

}  // namespace kronmde
