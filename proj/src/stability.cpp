#include "kronmde/stability.hpp"

#include "kronmde/rng.hpp"

namespace kronmde {

namespace {

constexpr int materialize_cap = 4096;

struct Factors {
    // all block-diagonal; sandwiches below are plain: C_A[r] = A r A
    std::vector<Mat> Q, Qinv;      // (Im m)^{1/2} and inverse
    std::vector<Mat> W, Winv;      // |T|^{1/2} and inverse
    std::vector<Mat> U;            // unitary part of T = S - i
    std::vector<Mat> T;            // (Im m)^{-1/2} Re m (Im m)^{-1/2} - i
    std::vector<Mat> Tabs_inv;     // |T|^{-1} = W^{-2}
};

Factors build_factors(const BlockVector& m) {
    const int N = m.N, K = m.K;
    Factors f;
    f.Q.resize(N); f.Qinv.resize(N); f.W.resize(N); f.Winv.resize(N);
    f.U.resize(N); f.T.resize(N); f.Tabs_inv.resize(N);
    for (int j = 0; j < N; ++j) {
        Mat im = (m.b[j] - m.b[j].adjoint()) / cx(0, 2);
        Mat re = (m.b[j] + m.b[j].adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Mat> es_im(im);
        if (es_im.eigenvalues().minCoeff() <= 1e-13)
            throw ContractError("f_operator_analysis: Im m is not safely positive");
        Eigen::VectorXd sq = es_im.eigenvalues().cwiseSqrt();
        f.Q[j] = es_im.eigenvectors() * sq.asDiagonal() *
                 es_im.eigenvectors().adjoint();
        f.Qinv[j] = es_im.eigenvectors() * sq.cwiseInverse().asDiagonal() *
                    es_im.eigenvectors().adjoint();

        // S_j = Q^{-1} Re m Q^{-1} is Hermitian; T = S - i is normal, so one
        // eigendecomposition of S gives |T|, W = |T|^{1/2} and the unitary U.
        Mat Sj = f.Qinv[j] * re * f.Qinv[j];
        Sj = (Sj + Sj.adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Mat> es_s(Sj);
        const Eigen::VectorXd lam = es_s.eigenvalues();
        const Mat V = es_s.eigenvectors();
        Eigen::VectorXd tabs = (lam.array().square() + 1.0).sqrt();
        Eigen::VectorXcd uph(K), tdiag(K);
        for (int p = 0; p < K; ++p) {
            uph(p) = cx(lam(p), -1.0) / tabs(p);
            tdiag(p) = cx(lam(p), -1.0);
        }
        f.T[j] = V * tdiag.asDiagonal() * V.adjoint();
        f.W[j] = V * tabs.cwiseSqrt().asDiagonal() * V.adjoint();
        f.Winv[j] = V * tabs.cwiseSqrt().cwiseInverse().asDiagonal() * V.adjoint();
        f.Tabs_inv[j] = V * tabs.cwiseInverse().asDiagonal() * V.adjoint();
        f.U[j] = V * uph.asDiagonal() * V.adjoint();
    }
    return f;
}

// r <- A r A blockwise (plain sandwich, matching the factor conventions)
void sandwich(const std::vector<Mat>& A, BlockVector& r) {
    for (int j = 0; j < r.N; ++j) r.b[j] = A[j] * r.b[j] * A[j];
}

void apply_f_operator(const SelfEnergy& S, const Factors& f, const BlockVector& r,
                      BlockVector& tmp, BlockVector& out) {
    tmp = r;
    sandwich(f.W, tmp);
    sandwich(f.Q, tmp);
    S.apply(tmp, out);
    sandwich(f.Q, out);
    sandwich(f.W, out);
}

}  // namespace

Eigen::MatrixXcd materialize_stability_operator(const HermitianDysonData& d,
                                                const BlockVector& m, cx z) {
    const int N = d.N, K = d.K, dim = N * K * K;
    if (dim > materialize_cap)
        throw ContractError("materialize_stability_operator: N K^2 exceeds cap 4096");
    if (m.N != N || m.K != K)
        throw ContractError("materialize_stability_operator: m has wrong shape");
    SelfEnergy S(d);
    Eigen::MatrixXcd L(dim, dim);
    BlockVector e(N, K), img(N, K);
    // column index (j, q, p): basis matrix E_pq in slot j, column-major blocks
    for (int j = 0; j < N; ++j)
        for (int q = 0; q < K; ++q)
            for (int p = 0; p < K; ++p) {
                e.b[j](p, q) = 1;
                S.apply(e, img);
                for (int jj = 0; jj < N; ++jj) {
                    img.b[jj] = -m.b[jj] * img.b[jj] * m.b[jj];
                    img.b[jj] += e.b[jj];
                }
                const int col = (j * K + q) * K + p;
                for (int jj = 0; jj < N; ++jj)
                    for (int qq = 0; qq < K; ++qq)
                        for (int pp = 0; pp < K; ++pp)
                            L((jj * K + qq) * K + pp, col) = img.b[jj](pp, qq);
                e.b[j](p, q) = 0;
            }
    (void)z;
    return L;
}

double linv_norm_hs(const HermitianDysonData& d, const BlockVector& m, cx z) {
    Eigen::MatrixXcd L = materialize_stability_operator(d, m, z);
    // sigma_min via the Gram matrix; cheaper than a full SVD at this scale
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(L.adjoint() * L,
                                                       Eigen::EigenvaluesOnly);
    const double smin = std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
    if (smin < 1e-14)
        throw ContractError("linv_norm_hs: stability operator is singular");
    return 1.0 / smin;
}

StabilityDiagnostics f_operator_analysis(const HermitianDysonData& d,
                                         const MdeSolution& sol) {
    const int N = d.N, K = d.K;
    SelfEnergy S(d);
    Factors f = build_factors(sol.m);

    StabilityDiagnostics diag;
    diag.norm_S_max = norm_self_energy_max(d);

    // power iteration from the flat positive direction; F-op is positivity
    // preserving so the iterates stay in the cone and converge to the Perron
    // eigenvector
    BlockVector F = BlockVector::identity(N, K);
    F *= cx(1.0 / F.hs_norm(), 0);
    BlockVector tmp(N, K), img(N, K);
    double lambda = 0, lambda_prev = -1;
    int it = 0;
    for (; it < 10000; ++it) {
        apply_f_operator(S, f, F, tmp, img);
        lambda = F.hs_inner_with(img);
        const double nn = img.hs_norm();
        if (nn == 0) break;
        img *= cx(1.0 / nn, 0);
        std::swap(F.b, img.b);
        if (std::abs(lambda - lambda_prev) <= 1e-10) { ++it; break; }
        lambda_prev = lambda;
    }
    diag.power_iterations = it;
    diag.norm_F = lambda;
    diag.norm_S_hs = lambda;
    diag.gap_F = 1.0 - lambda;

    // gap identity: 1 - |F| = Im z <F, W Im M W> / <F, |T|^{-1}>
    BlockVector WImW(N, K), TinvBV(N, K);
    for (int j = 0; j < N; ++j) {
        Mat im = (sol.m.b[j] - sol.m.b[j].adjoint()) / cx(0, 2);
        WImW.b[j] = f.W[j] * im * f.W[j];
        TinvBV.b[j] = f.Tabs_inv[j];
    }
    const double num = sol.z.imag() * F.hs_inner_with(WImW);
    const double den = F.hs_inner_with(TinvBV);
    const double rhs = num / den;
    diag.gap_identity_residual =
        std::abs(diag.gap_F - rhs) / std::max({std::abs(diag.gap_F), std::abs(rhs), 1e-300});

    diag.F = F;
    diag.W = BlockVector(N, K);
    diag.U = BlockVector(N, K);
    diag.T = BlockVector(N, K);
    for (int j = 0; j < N; ++j) {
        diag.W.b[j] = f.W[j];
        diag.U.b[j] = f.U[j];
        diag.T.b[j] = f.T[j];
    }
    return diag;
}

double verify_decomposition(const HermitianDysonData& d, const MdeSolution& sol,
                            int trials, uint64_t seed) {
    const int N = d.N, K = d.K;
    SelfEnergy S(d);
    Factors f = build_factors(sol.m);
    std::vector<Mat> Uadj(N);
    for (int j = 0; j < N; ++j) Uadj[j] = f.U[j].adjoint();

    rng::Stream st(seed, 0xdec0);
    double worst = 0;
    BlockVector R(N, K), lhs(N, K), rhs(N, K), tmp(N, K), ftmp(N, K);
    for (int t = 0; t < trials; ++t) {
        for (int j = 0; j < N; ++j)
            for (int p = 0; p < K; ++p)
                for (int q = 0; q < K; ++q) {
                    auto [g1, g2] = st.gauss_pair(t, j, p * K + q);
                    R.b[j](p, q) = cx(g1, g2);
                }
        // L[R] = R - M S[R] M
        S.apply(R, lhs);
        for (int j = 0; j < N; ++j)
            lhs.b[j] = R.b[j] - sol.m.b[j] * lhs.b[j] * sol.m.b[j];

        // C_Q C_W C_{U*} (C_U - F) C_W^{-1} C_Q^{-1} [R], applied inside-out
        rhs = R;
        sandwich(f.Qinv, rhs);
        sandwich(f.Winv, rhs);
        apply_f_operator(S, f, rhs, tmp, ftmp);
        sandwich(f.U, rhs);
        rhs -= ftmp;
        sandwich(Uadj, rhs);
        sandwich(f.W, rhs);
        sandwich(f.Q, rhs);

        const double defect = (lhs - rhs).hs_norm() / std::max(1e-300, R.hs_norm());
        worst = std::max(worst, defect);
    }
    return worst;
}

}  // namespace kronmde
