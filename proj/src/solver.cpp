#include "kronmde/solver.hpp"

#include <algorithm>

namespace kronmde {

namespace {

constexpr double damping_floor = 1e-6;

BlockVector auto_init(const HermitianDysonData& d, cx z) {
    BlockVector m = BlockVector::identity(d.N, d.K);
    m *= cx(0, 1.0 / (1.0 + std::abs(z)));
    return m;
}

// workspace shared across iterations to avoid reallocation in hot scans
struct Work {
    BlockVector S;      // S[m]
    BlockVector B;      // z - a + S[m]
    BlockVector mhat;   // -B^{-1}
    BlockVector cand;
    BlockVector Scand, Bcand;
    Eigen::PartialPivLU<Mat> lu;
};

// Frobenius residual max_j ||I + B_j m_j||_F; cheap inner-loop metric, upper
// bounds the final spectral-norm residual.
double frob_residual(const BlockVector& B, const BlockVector& m) {
    double worst = 0;
    const int K = B.K;
    Mat r(K, K);
    for (int j = 0; j < B.N; ++j) {
        r.noalias() = B.b[j] * m.b[j];
        r += Mat::Identity(K, K);
        worst = std::max(worst, r.norm());
    }
    return worst;
}

bool build_b_and_inverse(const HermitianDysonData& d, cx z, const BlockVector& S,
                         BlockVector& B, BlockVector* mhat, Work& w) {
    const int K = d.K;
    for (int j = 0; j < d.N; ++j) {
        B.b[j] = S.b[j] - d.a[j];
        B.b[j].diagonal().array() += z;
        if (mhat) {
            w.lu.compute(B.b[j]);
            mhat->b[j] = -w.lu.inverse();
            if (!mhat->b[j].allFinite()) return false;
        }
    }
    return true;
}

}  // namespace

BlockVector fixed_point_step(const HermitianDysonData& d, cx z,
                             const BlockVector& m, double damping) {
    if (z.imag() <= 0) throw ContractError("fixed_point_step: Im z must be > 0");
    SelfEnergy S(d);
    Work w;
    BlockVector Sm = S(m);
    BlockVector B(d.N, d.K), mhat(d.N, d.K);
    if (!build_b_and_inverse(d, z, Sm, B, &mhat, w))
        throw ContractError("fixed_point_step: singular z - a + S[m]");
    BlockVector out = m;
    for (int j = 0; j < d.N; ++j)
        out.b[j] = (1.0 - damping) * m.b[j] + damping * mhat.b[j];
    return out;
}

MdeSolution solve_at(const HermitianDysonData& d, cx z, const SolverOptions& opts) {
    if (z.imag() <= 0) throw ContractError("solve_at: Im z must be > 0");
    const int N = d.N, K = d.K;
    SelfEnergy S(d);

    MdeSolution sol;
    sol.z = z;
    sol.m = opts.init == InitKind::Given ? opts.init_given : auto_init(d, z);
    if (sol.m.N != N || sol.m.K != K)
        throw ContractError("solve_at: init_given has wrong shape");

    Work w;
    w.S = BlockVector(N, K);
    w.B = BlockVector(N, K);
    w.mhat = BlockVector(N, K);
    w.cand = BlockVector(N, K);
    w.Scand = BlockVector(N, K);
    w.Bcand = BlockVector(N, K);

    S.apply(sol.m, w.S);
    if (!build_b_and_inverse(d, z, w.S, w.B, &w.mhat, w)) {
        sol.residual = std::numeric_limits<double>::infinity();
        return sol;
    }
    double resid = frob_residual(w.B, sol.m);
    double theta = opts.damping_init;
    int streak = 0;  // consecutive accepted steps since last reset/rejection

    int it = 0;
    for (; it < opts.max_iter && resid > opts.tol; ++it) {
        for (int j = 0; j < N; ++j)
            w.cand.b[j] = (1.0 - theta) * sol.m.b[j] + theta * w.mhat.b[j];
        S.apply(w.cand, w.Scand);
        build_b_and_inverse(d, z, w.Scand, w.Bcand, nullptr, w);
        const double resid_c = frob_residual(w.Bcand, w.cand);

        const bool forced = !opts.damping_adapt || theta <= damping_floor;
        if (forced || resid_c <= resid * (1.0 + 1e-12) || !std::isfinite(resid)) {
            std::swap(sol.m.b, w.cand.b);
            std::swap(w.B.b, w.Bcand.b);
            resid = resid_c;
            for (int j = 0; j < N; ++j) {
                w.lu.compute(w.B.b[j]);
                w.mhat.b[j] = -w.lu.inverse();
            }
            if (opts.damping_adapt && ++streak >= 50) {
                theta = opts.damping_init;
                streak = 0;
            }
        } else {
            theta *= 0.5;  // candidate went uphill; m and mhat stay valid
            streak = 0;
        }
    }
    sol.iterations = it;

    // exact reported residual: spectral norm per block
    double wres = 0;
    for (int j = 0; j < N; ++j) {
        Mat r = Mat::Identity(K, K) + w.B.b[j] * sol.m.b[j];
        wres = std::max(wres, spectral_norm(r));
    }
    sol.residual = wres;
    sol.min_im_eig = sol.m.min_im_eig();
    sol.converged = sol.residual <= opts.tol && sol.min_im_eig > 0;
    return sol;
}

ContinuationResult solve_continuation(
    const HermitianDysonData& d, double E, const std::vector<double>& eta_targets,
    const SolverOptions& opts, const std::function<bool(const MdeSolution&)>* early_stop) {
    if (eta_targets.empty()) throw ContractError("solve_continuation: no targets");
    for (size_t i = 0; i < eta_targets.size(); ++i) {
        if (eta_targets[i] <= 0) throw ContractError("solve_continuation: eta must be > 0");
        if (i && eta_targets[i] >= eta_targets[i - 1])
            throw ContractError("solve_continuation: targets must descend");
    }

    ContinuationResult res;
    res.at_targets.resize(eta_targets.size());
    for (size_t i = 0; i < eta_targets.size(); ++i)
        res.at_targets[i].z = cx(E, eta_targets[i]);

    // ladder: geometric rungs from eta_start landing exactly on each target
    std::vector<double> rungs;
    double eta = std::max(opts.eta_start, eta_targets.front());
    size_t next = 0;
    while (next < eta_targets.size()) {
        if (eta <= eta_targets[next] * (1.0 + 1e-12)) {
            rungs.push_back(eta_targets[next]);
            ++next;
            if (next < eta_targets.size())
                eta = std::min(eta * opts.eta_ratio, eta_targets[next]);
            continue;
        }
        rungs.push_back(eta);
        eta *= opts.eta_ratio;
        if (next < eta_targets.size()) eta = std::max(eta, eta_targets[next]);
    }

    SolverOptions step = opts;
    bool have_warm = opts.init == InitKind::Given;
    BlockVector warm = opts.init_given;
    next = 0;
    for (double rung : rungs) {
        step.init = have_warm ? InitKind::Given : InitKind::Auto;
        step.init_given = warm;
        MdeSolution sol = solve_at(d, cx(E, rung), step);
        if (!sol.converged) {
            // one fresh restart before giving up on this rung
            SolverOptions retry = opts;
            retry.init = InitKind::Auto;
            retry.damping_init = std::min(0.25, opts.damping_init);
            sol = solve_at(d, cx(E, rung), retry);
        }
        const bool is_target =
            next < eta_targets.size() && rung == eta_targets[next];
        if (sol.converged) {
            res.last_converged_eta = rung;
            warm = sol.m;
            have_warm = true;
        }
        if (is_target) res.at_targets[next++] = sol;
        if (sol.converged && early_stop && (*early_stop)(sol)) {
            res.stopped_early = true;
            break;
        }
        if (!sol.converged && !is_target) {
            // failed interior rung: keep last warm start and push on
            continue;
        }
    }
    return res;
}

double rho_of(const MdeSolution& sol) {
    double tr = 0;
    for (const auto& m : sol.m.b) tr += m.imag().trace();
    return tr / (M_PI * double(sol.m.N) * double(sol.m.K));
}

double growth_of(const MdeSolution& sol) {
    const double eta = sol.z.imag();
    double worst = 0;
    for (const auto& m : sol.m.b) {
        Mat im = (m - m.adjoint()) / cx(0, 2);
        Eigen::SelfAdjointEigenSolver<Mat> es(im, Eigen::EigenvaluesOnly);
        worst = std::max(worst, std::max(std::abs(es.eigenvalues().minCoeff()),
                                         std::abs(es.eigenvalues().maxCoeff())));
    }
    return worst / eta;
}

}  // namespace kronmde
