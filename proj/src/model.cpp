#include "kronmde/model.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace kronmde {

namespace {

std::string fmt_idx(const char* what, int idx) {
    std::ostringstream os;
    os << what << "[" << idx << "]";
    return os.str();
}

void check_dims(const KroneckerModel& m, ValidationReport& rep) {
    const int L = m.structure.L, N = m.variances.N, ell = m.structure.ell;
    auto& dim = rep.dimension_errors;
    if (L < 1) dim.push_back("L must be >= 1");
    if (N < 1) dim.push_back("N must be >= 1");
    if (ell < 1) dim.push_back("ell must be >= 1");

    auto check_family = [&](const std::vector<Mat>& fam, const char* name) {
        if (static_cast<int>(fam.size()) != ell) {
            std::ostringstream os;
            os << name << " has " << fam.size() << " matrices, expected ell = " << ell;
            dim.push_back(os.str());
            return;
        }
        for (int k = 0; k < ell; ++k)
            if (fam[k].rows() != L || fam[k].cols() != L) {
                std::ostringstream os;
                os << fmt_idx(name, k) << " is " << fam[k].rows() << "x" << fam[k].cols()
                   << ", expected " << L << "x" << L;
                dim.push_back(os.str());
            }
    };
    check_family(m.structure.alpha_tilde, "alpha_tilde");
    check_family(m.structure.beta_tilde, "beta_tilde");
    check_family(m.structure.gamma_tilde, "gamma_tilde");

    if (static_cast<int>(m.expectation.a_tilde.size()) != N) {
        std::ostringstream os;
        os << "a_tilde has " << m.expectation.a_tilde.size() << " matrices, expected N = " << N;
        dim.push_back(os.str());
    } else {
        for (int i = 0; i < N; ++i)
            if (m.expectation.a_tilde[i].rows() != L || m.expectation.a_tilde[i].cols() != L)
                dim.push_back(fmt_idx("a_tilde", i) + " has wrong dimensions");
    }

    const auto& v = m.variances;
    if (v.kind == VarianceKind::Explicit) {
        if (static_cast<int>(v.s_full.size()) != ell) dim.push_back("variances.s has wrong family count");
        if (static_cast<int>(v.t_full.size()) != ell) dim.push_back("variances.t has wrong family count");
        for (int k = 0; k < static_cast<int>(v.s_full.size()); ++k)
            if (v.s_full[k].rows() != N || v.s_full[k].cols() != N)
                dim.push_back(fmt_idx("variances.s", k) + " is not N x N");
        for (int k = 0; k < static_cast<int>(v.t_full.size()); ++k)
            if (v.t_full[k].rows() != N || v.t_full[k].cols() != N)
                dim.push_back(fmt_idx("variances.t", k) + " is not N x N");
    } else {
        if (static_cast<int>(v.s_scale.size()) != ell) dim.push_back("variances.s_scale has wrong length");
        if (static_cast<int>(v.t_scale.size()) != ell) dim.push_back("variances.t_scale has wrong length");
        if (v.kind == VarianceKind::Banded && v.width < 0) dim.push_back("variances.width must be >= 0");
    }
}

void check_bounds(const KroneckerModel& m, ValidationReport& rep) {
    const int L = m.structure.L, N = m.variances.N, ell = m.structure.ell;
    auto& bad = rep.bound_violations;
    auto norm_check = [&](const std::vector<Mat>& fam, const char* name, double cap) {
        for (int k = 0; k < std::min<int>(fam.size(), ell); ++k) {
            if (fam[k].rows() != L || fam[k].cols() != L) continue;
            double nn = spectral_norm(fam[k]);
            if (nn > cap) {
                std::ostringstream os;
                os << "||" << fmt_idx(name, k) << "|| = " << nn << " exceeds " << cap;
                bad.push_back(os.str());
            }
        }
    };
    norm_check(m.structure.alpha_tilde, "alpha_tilde", m.kappa.k2);
    norm_check(m.structure.beta_tilde, "beta_tilde", m.kappa.k2);
    norm_check(m.structure.gamma_tilde, "gamma_tilde", m.kappa.k2);

    const double var_cap = m.kappa.k1 / N;
    const auto& v = m.variances;
    auto scale_check = [&](const std::vector<double>& sc, const char* name) {
        for (int k = 0; k < static_cast<int>(sc.size()); ++k) {
            if (sc[k] < 0) bad.push_back(fmt_idx(name, k) + " is negative");
            if (sc[k] > var_cap) {
                std::ostringstream os;
                os << fmt_idx(name, k) << " = " << sc[k] << " exceeds kappa1/N = " << var_cap;
                bad.push_back(os.str());
            }
        }
    };
    // Every violated entry is reported with its coordinates so a bad file is
    // fixable without bisecting.
    auto entry_checks = [&](const Eigen::MatrixXd& arr, const char* name, int k,
                            bool symmetric) {
        if (arr.rows() != N || arr.cols() != N) return;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                std::ostringstream at;
                at << name << " at (" << i << "," << j << ",family=" << k << ")";
                if (symmetric && j > i && arr(i, j) != arr(j, i))
                    bad.push_back(at.str() + " breaks symmetry: " +
                                  std::to_string(arr(i, j)) + " vs " +
                                  std::to_string(arr(j, i)));
                if (arr(i, j) < 0) bad.push_back(at.str() + " is negative");
                if (arr(i, j) > var_cap) {
                    std::ostringstream os;
                    os << at.str() << " = " << arr(i, j)
                       << " exceeds kappa1/N = " << var_cap;
                    bad.push_back(os.str());
                }
            }
    };
    if (v.kind == VarianceKind::Explicit) {
        for (int k = 0; k < static_cast<int>(v.s_full.size()); ++k)
            entry_checks(v.s_full[k], "variances.s", k, true);
        for (int k = 0; k < static_cast<int>(v.t_full.size()); ++k)
            entry_checks(v.t_full[k], "variances.t", k, false);
    } else {
        scale_check(v.s_scale, "variances.s_scale");
        scale_check(v.t_scale, "variances.t_scale");
    }

    for (int i = 0; i < std::min<int>(m.expectation.a_tilde.size(), N); ++i) {
        const Mat& a = m.expectation.a_tilde[i];
        if (a.rows() != L || a.cols() != L) continue;
        double nn = spectral_norm(a);
        if (nn > m.kappa.k3) {
            std::ostringstream os;
            os << "||" << fmt_idx("a_tilde", i) << "|| = " << nn << " exceeds " << m.kappa.k3;
            bad.push_back(os.str());
        }
    }
}

}  // namespace

ValidationReport validate(const KroneckerModel& model) {
    ValidationReport rep;
    check_dims(model, rep);
    if (rep.dimension_errors.empty()) check_bounds(model, rep);
    return rep;
}

bool is_hermitian_model(const KroneckerModel& m) {
    for (const auto& a : m.structure.alpha_tilde)
        if (!is_hermitian(a)) return false;
    for (int k = 0; k < m.ell(); ++k)
        if ((m.structure.gamma_tilde[k] - m.structure.beta_tilde[k].adjoint()).norm() >
            1e-14 * std::max(1.0, m.structure.beta_tilde[k].norm()))
            return false;
    for (const auto& a : m.expectation.a_tilde)
        if (!is_hermitian(a)) return false;
    return true;
}

HermitianDysonData hermitize(const KroneckerModel& m, cx zeta) {
    const int L = m.L(), K = 2 * L;
    HermitianDysonData d;
    d.K = K;
    d.N = m.N();
    d.ell = m.ell();
    d.var = m.variances;

    d.alpha.reserve(d.ell);
    d.beta.reserve(d.ell);
    for (int k = 0; k < d.ell; ++k) {
        Mat a = Mat::Zero(K, K);
        a.topRightCorner(L, L) = m.structure.alpha_tilde[k];
        a.bottomLeftCorner(L, L) = m.structure.alpha_tilde[k].adjoint();
        d.alpha.push_back(std::move(a));

        Mat b = Mat::Zero(K, K);
        b.topRightCorner(L, L) =
            m.structure.beta_tilde[k] + m.structure.gamma_tilde[k].adjoint();
        d.beta.push_back(std::move(b));
    }

    const Mat zI = zeta * Mat::Identity(L, L);
    d.a.reserve(d.N);
    for (int j = 0; j < d.N; ++j) {
        Mat a = Mat::Zero(K, K);
        a.topRightCorner(L, L) = m.expectation.a_tilde[j] - zI;
        a.bottomLeftCorner(L, L) = (m.expectation.a_tilde[j] - zI).adjoint();
        d.a.push_back(std::move(a));
    }
    return d;
}

HermitianDysonData direct_dyson_data(const KroneckerModel& m) {
    if (!is_hermitian_model(m))
        throw ContractError("direct_dyson_data requires a Hermitian model (use hermitize)");
    HermitianDysonData d;
    d.K = m.L();
    d.N = m.N();
    d.ell = m.ell();
    d.var = m.variances;
    d.alpha = m.structure.alpha_tilde;
    d.beta = m.structure.beta_tilde;
    d.a = m.expectation.a_tilde;
    return d;
}

Mat hermitized_matrix(const Mat& X, cx zeta) {
    if (X.rows() != X.cols()) throw ContractError("hermitized_matrix: X must be square");
    const Eigen::Index n = X.rows();
    Mat H = Mat::Zero(2 * n, 2 * n);
    Mat shifted = X - zeta * Mat::Identity(n, n);
    H.block(0, n, n, n) = shifted;
    H.block(n, 0, n, n) = shifted.adjoint();
    return H;
}

Mat assemble_hermitized_sample(const HermitianDysonData& d,
                               const std::vector<Mat>& X,
                               const std::vector<Mat>& Y) {
    const int K = d.K, N = d.N;
    Mat H = Mat::Zero(K * N, K * N);
    auto add_kron = [&](const Mat& st, const Mat& rn) {
        for (int p = 0; p < K; ++p)
            for (int q = 0; q < K; ++q)
                if (st(p, q) != cx(0, 0))
                    H.block(p * N, q * N, N, N) += st(p, q) * rn;
    };
    for (int k = 0; k < d.ell; ++k) {
        add_kron(d.alpha[k], X[k]);
        add_kron(d.beta[k], Y[k]);
        add_kron(d.beta[k].adjoint(), Y[k].adjoint());
    }
    for (int j = 0; j < N; ++j)
        for (int p = 0; p < K; ++p)
            for (int q = 0; q < K; ++q)
                H(p * N + j, q * N + j) += d.a[j](p, q);
    return H;
}

std::optional<UniformReduction> reduce_uniform(const HermitianDysonData& d) {
    if (!d.var.is_flat() || d.N == 1) return std::nullopt;

    auto same = [](const Mat& a, const Mat& b) {
        if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
        return std::memcmp(a.data(), b.data(), sizeof(cx) * a.size()) == 0;
    };
    std::vector<int> reps;  // index of first occurrence per group
    std::vector<int> group_of(d.N, -1);
    for (int j = 0; j < d.N; ++j) {
        for (int g = 0; g < static_cast<int>(reps.size()); ++g)
            if (same(d.a[j], d.a[reps[g]])) {
                group_of[j] = g;
                break;
            }
        if (group_of[j] < 0) {
            reps.push_back(j);
            group_of[j] = static_cast<int>(reps.size()) - 1;
            if (reps.size() > 8) return std::nullopt;  // not worth reducing
        }
    }
    const int G = static_cast<int>(reps.size());
    if (G == d.N) return std::nullopt;
    std::vector<int> size(G, 0);
    for (int j = 0; j < d.N; ++j) size[group_of[j]]++;
    // Equal group sizes keep the reduced flat profile exact (each group
    // contributes (N/G) * scale to every self-energy row).
    for (int g = 1; g < G; ++g)
        if (size[g] != size[0]) return std::nullopt;

    UniformReduction r;
    r.group_of = std::move(group_of);
    r.group_size = std::move(size);
    r.reduced.K = d.K;
    r.reduced.N = G;
    r.reduced.ell = d.ell;
    r.reduced.alpha = d.alpha;
    r.reduced.beta = d.beta;
    for (int g = 0; g < G; ++g) r.reduced.a.push_back(d.a[reps[g]]);
    r.reduced.var.N = G;
    r.reduced.var.kind = VarianceKind::Flat;
    const double blow = double(d.N) / G;
    for (double s : d.var.s_scale) r.reduced.var.s_scale.push_back(s * blow);
    for (double t : d.var.t_scale) r.reduced.var.t_scale.push_back(t * blow);
    return r;
}

}  // namespace kronmde
