#include "kronmde/self_energy.hpp"

#include "kronmde/rng.hpp"

namespace kronmde {

SelfEnergy::SelfEnergy(const HermitianDysonData& data) : d_(&data) {
    flat_ = data.var.is_flat();
    if (!flat_) return;

    // Trace form: all alpha zero and the beta family enumerates the upper-right
    // L x L matrix units exactly once at one shared scale.  Then
    //   sum_nu t (b r b^* + b^* r b) = t [[tr r_22 I, 0], [0, tr r_11 I]].
    const int K = data.K;
    if (K % 2 != 0) return;
    const int L = K / 2;
    if (data.ell != L * L) return;
    for (const auto& a : data.alpha)
        if (a.norm() != 0.0) return;
    std::vector<int> seen(L * L, 0);
    double scale = -1;
    for (int k = 0; k < data.ell; ++k) {
        const Mat& b = data.beta[k];
        int unit = -1;
        for (int p = 0; p < K; ++p)
            for (int q = 0; q < K; ++q) {
                if (b(p, q) == cx(0, 0)) continue;
                if (p >= L || q < L || unit >= 0 || b(p, q) != cx(1, 0)) return;
                unit = p * L + (q - L);
            }
        if (unit < 0) return;
        seen[unit]++;
        if (scale < 0) scale = data.var.t_scale[k];
        if (data.var.t_scale[k] != scale || data.var.s_scale[k] != 0.0) return;
    }
    for (int u : seen)
        if (u != 1) return;
    unit_trace_form_ = true;
    unit_scale_ = scale;
    half_ = L;
}

void SelfEnergy::apply_flat_shared(const BlockVector& r, Mat& shared) const {
    const auto& d = *d_;
    const int K = d.K;
    Mat rsum = Mat::Zero(K, K);
    for (const auto& x : r.b) rsum += x;

    if (unit_trace_form_) {
        const int L = half_;
        const cx tr11 = rsum.topLeftCorner(L, L).trace();
        const cx tr22 = rsum.bottomRightCorner(L, L).trace();
        shared.setZero(K, K);
        shared.topLeftCorner(L, L) = unit_scale_ * tr22 * Mat::Identity(L, L);
        shared.bottomRightCorner(L, L) = unit_scale_ * tr11 * Mat::Identity(L, L);
        return;
    }
    shared.setZero(K, K);
    for (int k = 0; k < d.ell; ++k) {
        const double s = d.var.s_scale[k], t = d.var.t_scale[k];
        if (s != 0.0) shared.noalias() += s * (d.alpha[k] * rsum * d.alpha[k]);
        if (t != 0.0) {
            shared.noalias() += t * (d.beta[k] * rsum * d.beta[k].adjoint());
            shared.noalias() += t * (d.beta[k].adjoint() * rsum * d.beta[k]);
        }
    }
}

void SelfEnergy::apply(const BlockVector& r, BlockVector& out) const {
    const auto& d = *d_;
    const int N = d.N, K = d.K;
    if (flat_) {
        Mat shared(K, K);
        apply_flat_shared(r, shared);
        for (int j = 0; j < N; ++j) out.b[j] = shared;
        return;
    }
    for (int j = 0; j < N; ++j) out.b[j].setZero(K, K);
    Mat tmp(K, K);
    for (int k = 0; k < d.ell; ++k) {
        const Mat& al = d.alpha[k];
        const Mat& be = d.beta[k];
        const Mat bead = be.adjoint();
        const bool have_alpha = al.norm() != 0.0;
        const bool have_beta = be.norm() != 0.0;
        for (int kk = 0; kk < N; ++kk) {
            if (have_alpha) {
                tmp.noalias() = al * r.b[kk] * al;
                for (int i = 0; i < N; ++i) {
                    const double s = d.var.s(k, i, kk);
                    if (s != 0.0) out.b[i] += s * tmp;
                }
            }
            if (have_beta) {
                tmp.noalias() = be * r.b[kk] * bead;
                for (int i = 0; i < N; ++i) {
                    const double t = d.var.t(k, i, kk);
                    if (t != 0.0) out.b[i] += t * tmp;
                }
                tmp.noalias() = bead * r.b[kk] * be;
                for (int i = 0; i < N; ++i) {
                    const double t = d.var.t(k, kk, i);  // transposed profile
                    if (t != 0.0) out.b[i] += t * tmp;
                }
            }
        }
    }
}

BlockVector apply_self_energy(const HermitianDysonData& data, const BlockVector& r) {
    if (r.N != data.N || r.K != data.K)
        throw ContractError("apply_self_energy: block vector has wrong shape");
    return SelfEnergy(data)(r);
}

double norm_self_energy_max(const HermitianDysonData& data) {
    return apply_self_energy(data, BlockVector::identity(data.N, data.K))
        .max_spectral_norm();
}

double self_adjoint_defect(const HermitianDysonData& data, int trials, uint64_t seed) {
    SelfEnergy S(data);
    rng::Stream st(seed, 0xad70);
    const int N = data.N, K = data.K;
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        BlockVector R(N, K), T(N, K);
        for (int j = 0; j < N; ++j)
            for (int p = 0; p < K; ++p)
                for (int q = 0; q < K; ++q) {
                    auto [g1, g2] = st.gauss_pair(t, 2 * j, p * K + q);
                    auto [g3, g4] = st.gauss_pair(t, 2 * j + 1, p * K + q);
                    R.b[j](p, q) = cx(g1, g2);
                    T.b[j](p, q) = cx(g3, g4);
                }
        cx lhs = 0, rhs = 0;
        BlockVector SR = S(R), ST = S(T);
        for (int j = 0; j < N; ++j) {
            lhs += (R.b[j].adjoint() * ST.b[j]).trace();
            rhs += (SR.b[j].adjoint() * T.b[j]).trace();
        }
        const double scale = double(N) * K;
        double defect = std::abs(lhs - rhs) / scale /
                        std::max(1e-300, R.hs_norm() * T.hs_norm());
        worst = std::max(worst, defect);
    }
    return worst;
}

}  // namespace kronmde
