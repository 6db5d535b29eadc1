#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>

#include "kronmde/model_io.hpp"
#include "kronmde/self_energy.hpp"

using namespace kronmde;
using namespace std::complex_literals;

namespace {

// Smallest complete model: L = 1, one Hermitian family, flat profile.
KroneckerModel scalar_wigner(int N) { return make_preset("wigner", N); }

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("presets validate clean") {
    for (const auto& name : preset_names()) {
        const int N = name == "two-band" ? 8 : 7;
        KroneckerModel m = make_preset(name, N);
        ValidationReport rep = validate(m);
        INFO(name);
        CHECK(rep.dimension_errors.empty());
        CHECK(rep.bound_violations.empty());
        CHECK(rep.ok());
    }
}

TEST_CASE("variance bound violations name the offending entry") {
    KroneckerModel m = scalar_wigner(4);
    m.kappa.k1 = 1.0;  // cap 1/N = 0.25
    m.variances.kind = VarianceKind::Explicit;
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(4, 4, 0.25);
    s(0, 1) = 2.0;
    s(1, 0) = 2.0;
    m.variances.s_full = {s};
    m.variances.t_full = {Eigen::MatrixXd::Zero(4, 4)};

    ValidationReport rep = validate(m);
    CHECK(rep.dimension_errors.empty());
    CHECK(!rep.bound_violations.empty());
    CHECK(any_contains(rep.bound_violations, "(0,1"));
    CHECK(any_contains(rep.bound_violations, "exceeds kappa1/N"));
}

TEST_CASE("asymmetric s is a symmetry violation, not a dimension error") {
    KroneckerModel m = scalar_wigner(3);
    m.variances.kind = VarianceKind::Explicit;
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(3, 3, 1.0 / 3);
    s(0, 1) = 0.1;  // s(1,0) stays 1/3
    m.variances.s_full = {s};
    m.variances.t_full = {Eigen::MatrixXd::Zero(3, 3)};

    ValidationReport rep = validate(m);
    CHECK(rep.dimension_errors.empty());
    CHECK(any_contains(rep.bound_violations, "symmetry"));
    CHECK(any_contains(rep.bound_violations, "(0,1"));
}

TEST_CASE("ragged structure is a dimension error, separate from bounds") {
    KroneckerModel m = scalar_wigner(3);
    m.structure.alpha_tilde[0] = Mat::Ones(1, 2);  // wrong shape for L = 1
    ValidationReport rep = validate(m);
    CHECK(!rep.dimension_errors.empty());
    CHECK(any_contains(rep.dimension_errors, "alpha_tilde[0]"));
    CHECK(rep.bound_violations.empty());
}

TEST_CASE("negative variances are rejected") {
    KroneckerModel m = scalar_wigner(3);
    m.variances.s_scale = {-0.5};
    ValidationReport rep = validate(m);
    CHECK(any_contains(rep.bound_violations, "negative"));
}

TEST_CASE("hermitization maps the scalar structures to the two-block form") {
    // alpha_tilde = [1]  ->  alpha = [[0,1],[1,0]]
    KroneckerModel m = scalar_wigner(2);
    HermitianDysonData d = hermitize(m, 0.0);
    REQUIRE(d.K == 2);
    CHECK(d.alpha[0](0, 0) == cx(0, 0));
    CHECK(d.alpha[0](0, 1) == cx(1, 0));
    CHECK(d.alpha[0](1, 0) == cx(1, 0));
    CHECK(d.alpha[0](1, 1) == cx(0, 0));
    // a_tilde = 0, zeta = 0  ->  a_j = 0
    for (const auto& a : d.a) CHECK(a.norm() == 0.0);
}

TEST_CASE("hermitization folds zeta into the expectation") {
    // beta_tilde = [1], gamma_tilde = [0], zeta = 2:
    //   beta = [[0,1],[0,0]],  a^zeta = [[0,-2],[-2,0]]
    KroneckerModel m = make_preset("ginibre", 2);
    HermitianDysonData d = hermitize(m, 2.0);
    REQUIRE(d.K == 2);
    CHECK(d.beta[0](0, 0) == cx(0, 0));
    CHECK(d.beta[0](0, 1) == cx(1, 0));
    CHECK(d.beta[0](1, 0) == cx(0, 0));
    CHECK(d.beta[0](1, 1) == cx(0, 0));
    for (const auto& a : d.a) {
        CHECK(a(0, 0) == cx(0, 0));
        CHECK(a(0, 1) == cx(-2, 0));
        CHECK(a(1, 0) == cx(-2, 0));
        CHECK(a(1, 1) == cx(0, 0));
    }
}

TEST_CASE("hermitized structures are exactly Hermitian for any model and zeta") {
    for (const auto& name : preset_names()) {
        const int N = name == "two-band" ? 4 : 3;
        KroneckerModel m = make_preset(name, N);
        for (cx zeta : {cx(0.3, -0.7), cx(-1.2, 0.4)}) {
            HermitianDysonData d = hermitize(m, zeta);
            for (const auto& al : d.alpha) CHECK((al - al.adjoint()).norm() == 0.0);
            for (const auto& a : d.a) CHECK((a - a.adjoint()).norm() == 0.0);
        }
    }
}

TEST_CASE("hermitized sample matrix: basic shapes") {
    Mat X0 = Mat::Zero(3, 3);
    CHECK(hermitized_matrix(X0, 0.0).norm() == 0.0);

    Mat X1 = Mat::Ones(1, 1);
    Mat H = hermitized_matrix(X1, 0.0);
    CHECK(H(0, 1) == cx(1, 0));
    CHECK(H(1, 0) == cx(1, 0));
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(1.0));

    // zeta equal to the only eigenvalue collapses H to zero
    CHECK(hermitized_matrix(X1, 1.0).norm() == 0.0);
}

TEST_CASE("zeta is an eigenvalue of X iff 0 is an eigenvalue of the hermitization") {
    // random fixed 4x4 (hand-rolled constants, no RNG dependency here)
    Mat X(4, 4);
    X << cx(0.3, 0.1), cx(-1.2, 0.0), cx(0.5, -0.4), cx(0.0, 0.9),
         cx(1.1, -0.2), cx(0.4, 0.3), cx(-0.7, 0.1), cx(0.2, 0.0),
         cx(-0.3, 0.5), cx(0.6, -0.1), cx(-0.8, 0.2), cx(1.0, -0.3),
         cx(0.1, 0.1), cx(-0.2, 0.7), cx(0.9, 0.0), cx(0.2, -0.6);
    Eigen::ComplexEigenSolver<Mat> ces(X);
    for (int i = 0; i < 4; ++i) {
        cx zeta = ces.eigenvalues()(i);
        Mat H = hermitized_matrix(X, zeta);
        CHECK((H - H.adjoint()).norm() == 0.0);
        Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().cwiseAbs().minCoeff() <= 1e-8 * X.norm());
        // chiral symmetry of the spectrum
        auto ev = es.eigenvalues();
        for (int k = 0; k < ev.size(); ++k)
            CHECK(ev(k) == doctest::Approx(-ev(ev.size() - 1 - k)).epsilon(1e-10));
    }
    // a point far from the spectrum keeps H boundedly invertible
    Mat Hfar = hermitized_matrix(X, cx(50, 0));
    Eigen::SelfAdjointEigenSolver<Mat> far(Hfar, Eigen::EigenvaluesOnly);
    CHECK(far.eigenvalues().cwiseAbs().minCoeff() > 40.0);
}

TEST_CASE("direct data for Hermitian models skips the doubling") {
    KroneckerModel m = scalar_wigner(5);
    REQUIRE(is_hermitian_model(m));
    HermitianDysonData d = direct_dyson_data(m);
    CHECK(d.K == 1);
    CHECK(d.N == 5);

    KroneckerModel g = make_preset("ginibre", 5);
    CHECK(!is_hermitian_model(g));
    CHECK_THROWS_AS(direct_dyson_data(g), ContractError);
}

TEST_CASE("model JSON round-trips bit-exactly") {
    for (const auto& name : preset_names()) {
        const int N = name == "two-band" ? 6 : 5;
        KroneckerModel m = make_preset(name, N);
        std::string once = serialize_model(m);
        KroneckerModel back = parse_model(once);
        std::string twice = serialize_model(back);
        INFO(name);
        CHECK(once == twice);
        CHECK(model_hash(m) == model_hash(back));
    }
}

TEST_CASE("parse errors name the offending field") {
    CHECK_THROWS_WITH_AS(parse_model("{\"L\": 1}"), doctest::Contains("N"),
                         ContractError);
    // alpha_tilde with a non-numeric entry
    std::string bad = R"({"L":1,"N":1,"ell":1,
        "alpha_tilde":[[[["x",0]]]],
        "beta_tilde":[[[[0,0]]]],
        "gamma_tilde":[[[[0,0]]]],
        "variances":{"kind":"flat","s_scale":[1.0],"t_scale":[0.0]},
        "a_tilde":[[[[0,0]]]]})";
    CHECK_THROWS_WITH_AS(parse_model(bad), doctest::Contains("alpha_tilde"),
                         ContractError);
}

TEST_CASE("model hashes separate different models") {
    CHECK(model_hash(make_preset("wigner", 8)) != model_hash(make_preset("wigner", 9)));
    CHECK(model_hash(make_preset("fig1a", 8)) != model_hash(make_preset("fig1b", 8)));
}

TEST_CASE("closed-form zeta sets are recognized on the example presets") {
    auto za = example_zeta_set(make_preset("fig1b", 6));
    REQUIRE(za.has_value());
    REQUIRE(za->size() == 2);
    CHECK(((*za)[0] == cx(1, 0) || (*za)[1] == cx(1, 0)));
    CHECK(((*za)[0] == cx(-1, 0) || (*za)[1] == cx(-1, 0)));

    auto zg = example_zeta_set(make_preset("ginibre", 6));
    REQUIRE(zg.has_value());
    REQUIRE(zg->size() == 1);
    CHECK((*zg)[0] == cx(0, 0));

    CHECK(!example_zeta_set(make_preset("wigner", 6)).has_value());
    CHECK(!example_zeta_set(make_preset("two-band", 6)).has_value());

    auto zd = example_zeta_set(make_preset("fig1d", 4));
    REQUIRE(zd.has_value());
    CHECK(zd->size() == 5);
}

TEST_CASE("uniform-group reduction reproduces the self-energy on block-constant input") {
    // two-band: a_i = +3 on the first half, -3 on the second
    KroneckerModel m = make_preset("two-band", 8);
    HermitianDysonData full = direct_dyson_data(m);
    auto red = reduce_uniform(full);
    REQUIRE(red.has_value());
    REQUIRE(red->reduced.N == 2);
    for (int g : red->group_size) CHECK(g == 4);

    // block-constant input: r_j = value of its group
    BlockVector rg(2, full.K);
    rg.b[0] << cx(0.7, 0.1);
    rg.b[1] << cx(-0.2, 0.4);
    BlockVector rfull(full.N, full.K);
    for (int j = 0; j < full.N; ++j) rfull.b[j] = rg.b[red->group_of[j]];

    BlockVector sf = apply_self_energy(full, rfull);
    BlockVector sr = apply_self_energy(red->reduced, rg);
    for (int j = 0; j < full.N; ++j)
        CHECK((sf.b[j] - sr.b[red->group_of[j]]).norm() <= 1e-14);

    // hermitized ginibre reduces to one group
    KroneckerModel g = make_preset("ginibre", 6);
    auto redg = reduce_uniform(hermitize(g, cx(0.5, -0.25)));
    REQUIRE(redg.has_value());
    CHECK(redg->reduced.N == 1);
}

TEST_CASE("explicit profiles are not reduced") {
    KroneckerModel m = scalar_wigner(4);
    m.variances.kind = VarianceKind::Explicit;
    m.variances.s_full = {Eigen::MatrixXd::Constant(4, 4, 0.25)};
    m.variances.t_full = {Eigen::MatrixXd::Zero(4, 4)};
    CHECK(!reduce_uniform(direct_dyson_data(m)).has_value());
}

TEST_CASE("deterministic models assemble to the expectation block diagonal") {
    // all variances zero: H^zeta from family samples equals the hermitized
    // deterministic matrix up to the block-interleaving permutation, so the
    // spectra coincide
    KroneckerModel m = make_preset("fig1b", 3);
    m.variances.t_scale = {0.0, 0.0, 0.0, 0.0};
    m.variances.s_scale.assign(m.ell(), 0.0);
    cx zeta(0.4, 0.3);
    HermitianDysonData d = hermitize(m, zeta);

    std::vector<Mat> X(d.ell, Mat::Zero(3, 3)), Y(d.ell, Mat::Zero(3, 3));
    Mat H1 = assemble_hermitized_sample(d, X, Y);
    CHECK((H1 - H1.adjoint()).norm() == 0.0);

    // deterministic X = sum_i a_tilde_i kron E_ii
    const int L = m.L(), N = m.N();
    Mat Xdet = Mat::Zero(L * N, L * N);
    for (int i = 0; i < N; ++i)
        for (int p = 0; p < L; ++p)
            for (int q = 0; q < L; ++q)
                Xdet(p * N + i, q * N + i) += m.expectation.a_tilde[i](p, q);
    Mat H2 = hermitized_matrix(Xdet, zeta);

    Eigen::SelfAdjointEigenSolver<Mat> e1(H1, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> e2(H2, Eigen::EigenvaluesOnly);
    for (int k = 0; k < e1.eigenvalues().size(); ++k)
        CHECK(e1.eigenvalues()(k) ==
              doctest::Approx(e2.eigenvalues()(k)).epsilon(1e-12));
}
