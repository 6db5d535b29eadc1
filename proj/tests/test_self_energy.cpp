#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kronmde/model_io.hpp"
#include "kronmde/rng.hpp"
#include "kronmde/self_energy.hpp"

using namespace kronmde;

namespace {

// Reference evaluation straight from the defining sum, no fast paths.  The
// production code must agree with this on every profile shape.
BlockVector naive_self_energy(const HermitianDysonData& d, const BlockVector& r) {
    BlockVector out(d.N, d.K);
    for (int i = 0; i < d.N; ++i) {
        Mat acc = Mat::Zero(d.K, d.K);
        for (int k = 0; k < d.N; ++k)
            for (int f = 0; f < d.ell; ++f) {
                const double s = d.var.s(f, i, k);
                if (s != 0) acc += s * d.alpha[f] * r.b[k] * d.alpha[f];
                const double t = d.var.t(f, i, k);
                if (t != 0) acc += t * d.beta[f] * r.b[k] * d.beta[f].adjoint();
                const double tk = d.var.t(f, k, i);
                if (tk != 0) acc += tk * d.beta[f].adjoint() * r.b[k] * d.beta[f];
            }
        out.b[i] = acc;
    }
    return out;
}

BlockVector random_blocks(int N, int K, uint64_t seed, bool hermitian = false) {
    rng::Stream st(seed, 0x7e57);
    BlockVector v(N, K);
    for (int j = 0; j < N; ++j) {
        Mat m(K, K);
        for (int p = 0; p < K; ++p)
            for (int q = 0; q < K; ++q) {
                auto [re, im] = st.gauss_pair(j, p, q);
                m(p, q) = cx(re, im);
            }
        v.b[j] = hermitian ? Mat((m + m.adjoint()) / 2) : m;
    }
    return v;
}

BlockVector random_psd(int N, int K, uint64_t seed) {
    BlockVector v = random_blocks(N, K, seed);
    for (auto& m : v.b) m = Mat(m * m.adjoint());
    return v;
}

double diff_norm(const BlockVector& a, const BlockVector& b) {
    double s = 0;
    for (int j = 0; j < a.N; ++j) s = std::max(s, (a.b[j] - b.b[j]).norm());
    return s;
}

std::vector<HermitianDysonData> probe_data() {
    std::vector<HermitianDysonData> out;
    out.push_back(direct_dyson_data(make_preset("wigner", 5)));
    out.push_back(direct_dyson_data(make_preset("two-band", 6)));
    out.push_back(hermitize(make_preset("ginibre", 5), cx(0.3, -0.2)));
    out.push_back(hermitize(make_preset("fig1b", 4), cx(-0.6, 0.4)));
    out.push_back(hermitize(make_preset("fig1d", 3), cx(0.1, 0.8)));
    out.push_back(hermitize(make_preset("wigner", 4), cx(0.5, 0.0)));
    return out;
}

}  // namespace

TEST_CASE("hand-checked 2x2 example") {
    // N = 2, K = 2, one Hermitian family alpha = [[0,1],[1,0]], s == 1/2:
    // r_1 = E_00, r_2 = 0  ->  S_1[r] = S_2[r] = (1/2) E_11
    HermitianDysonData d;
    d.K = 2;
    d.N = 2;
    d.ell = 1;
    Mat sx(2, 2);
    sx << 0, 1, 1, 0;
    d.alpha = {sx};
    d.beta = {Mat::Zero(2, 2)};
    d.a = {Mat::Zero(2, 2), Mat::Zero(2, 2)};
    d.var.N = 2;
    d.var.kind = VarianceKind::Flat;
    d.var.s_scale = {0.5};
    d.var.t_scale = {0.0};

    BlockVector r(2, 2);
    r.b[0] << 1, 0, 0, 0;
    BlockVector s = apply_self_energy(d, r);
    Mat want(2, 2);
    want << 0, 0, 0, 0.5;
    CHECK((s.b[0] - want).norm() <= 1e-15);
    CHECK((s.b[1] - want).norm() <= 1e-15);
}

TEST_CASE("flat Wigner maps the identity to the identity") {
    HermitianDysonData d = direct_dyson_data(make_preset("wigner", 7));
    BlockVector one = BlockVector::identity(7, 1);
    BlockVector s = apply_self_energy(d, one);
    for (const auto& m : s.b) CHECK(std::abs(m(0, 0) - cx(1, 0)) <= 1e-15);
    CHECK(norm_self_energy_max(d) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hermitized iid maps the identity to the identity") {
    HermitianDysonData d = hermitize(make_preset("ginibre", 6), cx(1, 1));
    BlockVector s = apply_self_energy(d, BlockVector::identity(6, 2));
    for (const auto& m : s.b) CHECK((m - Mat::Identity(2, 2)).norm() <= 1e-15);
    CHECK(norm_self_energy_max(d) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero input maps to zero") {
    for (const auto& d : probe_data()) {
        BlockVector z = apply_self_energy(d, BlockVector::zero(d.N, d.K));
        for (const auto& m : z.b) CHECK(m.norm() == 0.0);
    }
}

TEST_CASE("fast paths agree with the defining sum") {
    uint64_t seed = 1;
    for (const auto& d : probe_data()) {
        BlockVector r = random_blocks(d.N, d.K, seed++);
        CHECK(diff_norm(apply_self_energy(d, r), naive_self_energy(d, r)) <= 1e-13);
    }
}

TEST_CASE("explicit profile equals the equivalent flat profile") {
    KroneckerModel flat = make_preset("wigner", 6);
    KroneckerModel expl = flat;
    expl.variances.kind = VarianceKind::Explicit;
    expl.variances.s_full = {Eigen::MatrixXd::Constant(6, 6, 1.0 / 6)};
    expl.variances.t_full = {Eigen::MatrixXd::Zero(6, 6)};
    HermitianDysonData df = direct_dyson_data(flat);
    HermitianDysonData de = direct_dyson_data(expl);
    BlockVector r = random_blocks(6, 1, 99);
    CHECK(diff_norm(apply_self_energy(df, r), apply_self_energy(de, r)) <= 1e-14);
}

TEST_CASE("banded profile matches a hand-masked explicit profile") {
    KroneckerModel m = make_preset("wigner", 6);
    m.variances.kind = VarianceKind::Banded;
    m.variances.width = 1;
    HermitianDysonData db = direct_dyson_data(m);

    KroneckerModel e = make_preset("wigner", 6);
    e.variances.kind = VarianceKind::Explicit;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (std::abs(i - j) <= 1) s(i, j) = 1.0 / 6;
    e.variances.s_full = {s};
    e.variances.t_full = {Eigen::MatrixXd::Zero(6, 6)};
    HermitianDysonData de = direct_dyson_data(e);

    BlockVector r = random_blocks(6, 1, 7);
    CHECK(diff_norm(apply_self_energy(db, r), apply_self_energy(de, r)) <= 1e-14);
    CHECK(diff_norm(apply_self_energy(db, r), naive_self_energy(db, r)) <= 1e-14);
}

TEST_CASE("linearity") {
    for (const auto& d : probe_data()) {
        BlockVector r1 = random_blocks(d.N, d.K, 21);
        BlockVector r2 = random_blocks(d.N, d.K, 22);
        cx a(0.7, -0.3), b(-1.1, 0.2);
        BlockVector combo = r1;
        combo *= a;
        BlockVector tmp = r2;
        tmp *= b;
        combo += tmp;
        BlockVector lhs = apply_self_energy(d, combo);
        BlockVector s1 = apply_self_energy(d, r1);
        BlockVector s2 = apply_self_energy(d, r2);
        s1 *= a;
        s2 *= b;
        s1 += s2;
        CHECK(diff_norm(lhs, s1) <= 1e-12);
    }
}

TEST_CASE("positivity preservation on random PSD inputs") {
    uint64_t seed = 5;
    for (const auto& d : probe_data()) {
        for (int trial = 0; trial < 20; ++trial) {
            BlockVector r = random_psd(d.N, d.K, seed++);
            BlockVector s = apply_self_energy(d, r);
            for (const auto& m : s.b) {
                Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
                CHECK(es.eigenvalues().minCoeff() >= -1e-12);
            }
        }
    }
}

TEST_CASE("self-adjointness for the normalized trace pairing") {
    uint64_t seed = 500;
    for (const auto& d : probe_data())
        CHECK(self_adjoint_defect(d, 10, seed++) <= 1e-12);
}

TEST_CASE("hermiticity preservation") {
    for (const auto& d : probe_data()) {
        BlockVector r = random_blocks(d.N, d.K, 31, true);
        BlockVector s = apply_self_energy(d, r);
        for (const auto& m : s.b) CHECK((m - m.adjoint()).norm() <= 1e-13);
    }
}

TEST_CASE("norm bound from model constants") {
    // ||S|| <= 3 ell kappa1 kappa2^2 with the effective constants
    // kappa1 = N * max variance entry, kappa2 = max structure norm
    for (const auto& name : preset_names()) {
        const int N = name == "two-band" ? 6 : 5;
        KroneckerModel m = make_preset(name, N);
        HermitianDysonData d =
            is_hermitian_model(m) ? direct_dyson_data(m) : hermitize(m, cx(0.2, 0.1));
        double vmax = 0;
        for (int f = 0; f < d.ell; ++f)
            for (int i = 0; i < d.N; ++i)
                for (int k = 0; k < d.N; ++k)
                    vmax = std::max({vmax, d.var.s(f, i, k), d.var.t(f, i, k)});
        double smax = 0;
        for (const auto& al : d.alpha) smax = std::max(smax, spectral_norm(al));
        for (const auto& be : d.beta) smax = std::max(smax, spectral_norm(be));
        const double bound = 3.0 * d.ell * (d.N * vmax) * smax * smax;
        INFO(name);
        CHECK(norm_self_energy_max(d) <= bound * (1 + 1e-12));
    }
}
