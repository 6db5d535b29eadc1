#include "kronmde/model_io.hpp"

namespace kronmde {

namespace {

KroneckerModel scalar_model(int N, cx alpha, cx beta, double s, double t) {
    KroneckerModel m;
    m.structure.L = 1;
    m.structure.ell = 1;
    m.structure.alpha_tilde = {alpha * Mat::Identity(1, 1)};
    m.structure.beta_tilde = {beta * Mat::Identity(1, 1)};
    m.structure.gamma_tilde = {Mat::Zero(1, 1)};
    m.variances.N = N;
    m.variances.kind = VarianceKind::Flat;
    m.variances.s_scale = {s};
    m.variances.t_scale = {t};
    m.expectation.a_tilde.assign(N, Mat::Zero(1, 1));
    return m;
}

// Zero alpha structure, one matrix-unit beta family per (p,q) at flat
// variance 1/(N L), constant diagonal expectation diag(zetas): the family
// whose limiting pseudospectrum has the closed form sum 1/|zeta_i - zeta|^2.
KroneckerModel example_model(int N, const std::vector<cx>& zetas) {
    const int L = static_cast<int>(zetas.size());
    KroneckerModel m;
    m.structure.L = L;
    m.structure.ell = L * L;
    Mat diag = Mat::Zero(L, L);
    for (int p = 0; p < L; ++p) diag(p, p) = zetas[p];
    for (int p = 0; p < L; ++p)
        for (int q = 0; q < L; ++q) {
            Mat unit = Mat::Zero(L, L);
            unit(p, q) = 1;
            m.structure.beta_tilde.push_back(std::move(unit));
            m.structure.alpha_tilde.push_back(Mat::Zero(L, L));
            m.structure.gamma_tilde.push_back(Mat::Zero(L, L));
        }
    m.variances.N = N;
    m.variances.kind = VarianceKind::Flat;
    m.variances.s_scale.assign(L * L, 0.0);
    m.variances.t_scale.assign(L * L, 1.0 / (double(N) * L));
    m.expectation.a_tilde.assign(N, diag);
    return m;
}

}  // namespace

KroneckerModel make_preset(const std::string& name, int N) {
    if (N < 1) throw ContractError("preset N must be >= 1");
    if (name == "wigner") return scalar_model(N, 1, 0, 1.0 / N, 0);
    if (name == "ginibre") return scalar_model(N, 0, 1, 0, 1.0 / N);
    if (name == "fig1a") return example_model(N, {cx(0.97), cx(-0.97)});
    if (name == "fig1b") return example_model(N, {cx(1.0), cx(-1.0)});
    if (name == "fig1c") return example_model(N, {cx(1.03), cx(-1.03)});
    if (name == "fig1d")
        return example_model(
            N, {cx(0), cx(1.4), cx(-1.4), cx(0.8, 1.26), cx(-0.8, 1.26)});
    if (name == "two-band") {
        if (N % 2 != 0) throw ContractError("two-band preset requires even N");
        KroneckerModel m = scalar_model(N, 1, 0, 1.0 / N, 0);
        for (int i = 0; i < N; ++i)
            m.expectation.a_tilde[i](0, 0) = i < N / 2 ? 3.0 : -3.0;
        return m;
    }
    throw ContractError("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
    return {"wigner", "ginibre", "fig1a", "fig1b", "fig1c", "fig1d", "two-band"};
}

}  // namespace kronmde
