#pragma once

// Shared test utilities: seeded random Dyson data for contract suites and
// small conveniences.  Kept header-only; tests are the only consumers.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "kronmde/model.hpp"
#include "kronmde/rng.hpp"

namespace testutil {

using kronmde::BlockVector;
using kronmde::cx;
using kronmde::HermitianDysonData;
using kronmde::Mat;
using kronmde::VarianceKind;

inline Mat random_complex(kronmde::rng::Stream& st, int rows, int cols,
                          uint64_t tag) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            auto [re, im] = st.gauss_pair(tag, i, j);
            m(i, j) = cx(re, im);
        }
    return m;
}

inline Mat random_hermitian(kronmde::rng::Stream& st, int n, uint64_t tag) {
    Mat m = random_complex(st, n, n, tag);
    return Mat((m + m.adjoint()) / 2);
}

// Random admissible Hermitian Dyson data: Hermitian a_j, Hermitian alpha,
// general beta, mixed profile kinds; dimensions bounded by the arguments.
// All entries scale like the model bounds (variances ~ 1/N, structures ~ 1).
inline HermitianDysonData random_dyson_data(uint64_t seed, int max_N = 32,
                                            int max_K = 4) {
    kronmde::rng::Stream st(seed, 0xdada);
    auto pick = [&](uint64_t tag, int lo, int hi) {
        return lo + static_cast<int>(st.raw(tag, 0, 0)[0] % (hi - lo + 1));
    };
    HermitianDysonData d;
    d.N = pick(1, 2, max_N);
    d.K = pick(2, 1, max_K);
    d.ell = pick(3, 1, 2);

    for (int f = 0; f < d.ell; ++f) {
        Mat al = random_hermitian(st, d.K, 100 + f);
        d.alpha.push_back(al / std::max(1.0, kronmde::spectral_norm(al)));
        Mat be = random_complex(st, d.K, d.K, 200 + f);
        d.beta.push_back(be / std::max(1.0, kronmde::spectral_norm(be)));
    }
    for (int j = 0; j < d.N; ++j) {
        Mat a = random_hermitian(st, d.K, 300 + j);
        d.a.push_back(a / std::max(1.0, kronmde::spectral_norm(a) / 2.0));
    }

    d.var.N = d.N;
    const int kind = pick(4, 0, 2);
    if (kind == 0) {
        d.var.kind = VarianceKind::Flat;
        for (int f = 0; f < d.ell; ++f) {
            d.var.s_scale.push_back(st.uniform(400 + f, 0, 0) / d.N);
            d.var.t_scale.push_back(st.uniform(500 + f, 0, 0) / d.N);
        }
    } else if (kind == 1) {
        d.var.kind = VarianceKind::Banded;
        d.var.width = pick(5, 0, std::max(0, d.N / 2));
        for (int f = 0; f < d.ell; ++f) {
            d.var.s_scale.push_back(st.uniform(400 + f, 0, 0) / d.N);
            d.var.t_scale.push_back(st.uniform(500 + f, 0, 0) / d.N);
        }
    } else {
        d.var.kind = VarianceKind::Explicit;
        for (int f = 0; f < d.ell; ++f) {
            Eigen::MatrixXd s(d.N, d.N), t(d.N, d.N);
            for (int i = 0; i < d.N; ++i)
                for (int j = 0; j < d.N; ++j) {
                    s(i, j) = st.uniform(600 + f, i, j) / d.N;
                    t(i, j) = st.uniform(700 + f, i, j) / d.N;
                }
            s = ((s + s.transpose()) / 2).eval();  // symmetric for the alpha family
            d.var.s_full.push_back(s);
            d.var.t_full.push_back(t);
        }
    }
    return d;
}

// Random Herglotz start: Hermitian + i * (strictly positive definite).
inline BlockVector random_herglotz(uint64_t seed, int N, int K) {
    kronmde::rng::Stream st(seed, 0x4e59);
    BlockVector v(N, K);
    for (int j = 0; j < N; ++j) {
        Mat h = random_hermitian(st, K, 2 * j);
        Mat g = random_complex(st, K, K, 2 * j + 1);
        v.b[j] = h + cx(0, 1) * (g * g.adjoint() + 0.05 * Mat::Identity(K, K));
    }
    return v;
}

}  // namespace testutil
