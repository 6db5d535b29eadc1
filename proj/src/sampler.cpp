#include "kronmde/sampler.hpp"

#include <algorithm>
#include <numeric>

#include <lapacke.h>

#include "kronmde/rng.hpp"

namespace kronmde {

namespace {

// stream ids: Hermitian family mu -> mu, independent family nu -> 2^32 + nu
constexpr uint64_t y_stream_base = uint64_t(1) << 32;

cx herm_offdiag_draw(const rng::Stream& st, Distribution dist, uint64_t trial,
                     int i, int j, double var) {
    if (var == 0) return 0;
    switch (dist) {
        case Distribution::ComplexGaussian: {
            auto [g1, g2] = st.gauss_pair(trial, i, j);
            return std::sqrt(var / 2) * cx(g1, g2);
        }
        case Distribution::RealGaussian: {
            auto [g1, g2] = st.gauss_pair(trial, i, j);
            (void)g2;
            return std::sqrt(var) * g1;
        }
        default: {
            auto [s1, s2] = st.sign_pair(trial, i, j);
            return std::sqrt(var / 2) * cx(s1, s2);
        }
    }
}

double real_draw(const rng::Stream& st, Distribution dist, uint64_t trial,
                 int i, int j, double var) {
    if (var == 0) return 0;
    if (dist == Distribution::Rademacher)
        return std::sqrt(var) * st.sign_pair(trial, i, j).first;
    return std::sqrt(var) * st.gauss_pair(trial, i, j).first;
}

cx general_draw(const rng::Stream& st, Distribution dist, uint64_t trial,
                int i, int j, double var) {
    if (var == 0) return 0;
    switch (dist) {
        case Distribution::ComplexGaussian: {
            auto [g1, g2] = st.gauss_pair(trial, i, j);
            return std::sqrt(var / 2) * cx(g1, g2);
        }
        case Distribution::RealGaussian: {
            auto [g1, g2] = st.gauss_pair(trial, i, j);
            (void)g2;
            return std::sqrt(var) * g1;
        }
        default: {
            auto [s1, s2] = st.sign_pair(trial, i, j);
            return std::sqrt(var / 2) * cx(s1, s2);
        }
    }
}

void check_lapack(int info, const char* what) {
    if (info != 0)
        throw std::runtime_error(std::string(what) + " failed with info = " +
                                 std::to_string(info));
}

}  // namespace

FamilySamples sample_families(const KroneckerModel& model, const SampleConfig& cfg,
                              int trial_index) {
    const int N = model.N(), ell = model.ell();
    FamilySamples out;
    out.X.reserve(ell);
    out.Y.reserve(ell);
    const uint64_t trial = static_cast<uint64_t>(trial_index);
    for (int k = 0; k < ell; ++k) {
        rng::Stream st(cfg.seed, static_cast<uint64_t>(k));
        Mat X = Mat::Zero(N, N);
        bool active = false;
        for (int i = 0; i < N && !active; ++i)
            for (int j = 0; j < N; ++j)
                if (model.variances.s(k, i, j) != 0) { active = true; break; }
        if (active) {
            for (int i = 0; i < N; ++i) {
                X(i, i) = real_draw(st, cfg.distribution, trial, i, i,
                                    model.variances.s(k, i, i));
                for (int j = i + 1; j < N; ++j) {
                    X(i, j) = herm_offdiag_draw(st, cfg.distribution, trial, i, j,
                                                model.variances.s(k, i, j));
                    X(j, i) = std::conj(X(i, j));
                }
            }
        }
        out.X.push_back(std::move(X));

        rng::Stream sy(cfg.seed, y_stream_base + static_cast<uint64_t>(k));
        Mat Y = Mat::Zero(N, N);
        active = false;
        for (int i = 0; i < N && !active; ++i)
            for (int j = 0; j < N; ++j)
                if (model.variances.t(k, i, j) != 0) { active = true; break; }
        if (active)
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    Y(i, j) = general_draw(sy, cfg.distribution, trial, i, j,
                                           model.variances.t(k, i, j));
        out.Y.push_back(std::move(Y));
    }
    return out;
}

Mat sample_model(const KroneckerModel& model, const SampleConfig& cfg, int trial_index) {
    const int L = model.L(), N = model.N();
    FamilySamples fam = sample_families(model, cfg, trial_index);
    Mat X = Mat::Zero(L * N, L * N);
    auto add_kron = [&](const Mat& st, const Mat& rn) {
        for (int p = 0; p < L; ++p)
            for (int q = 0; q < L; ++q)
                if (st(p, q) != cx(0, 0))
                    X.block(p * N, q * N, N, N) += st(p, q) * rn;
    };
    for (int k = 0; k < model.ell(); ++k) {
        add_kron(model.structure.alpha_tilde[k], fam.X[k]);
        add_kron(model.structure.beta_tilde[k], fam.Y[k]);
        add_kron(model.structure.gamma_tilde[k], fam.Y[k].adjoint());
    }
    for (int j = 0; j < N; ++j)
        for (int p = 0; p < L; ++p)
            for (int q = 0; q < L; ++q)
                X(p * N + j, q * N + j) += model.expectation.a_tilde[j](p, q);
    return X;
}

Eigen::VectorXd eig_hermitian(const Mat& H, const SampleConfig& cfg, Mat* vectors) {
    const int n = static_cast<int>(H.rows());
    if (H.cols() != n) throw ContractError("eig_hermitian: matrix must be square");
    if ((H - H.adjoint()).norm() > 1e-10 * std::max(1e-300, H.norm()))
        throw ContractError("eig_hermitian: input is not Hermitian");
    if (!cfg.override_caps && n > cfg.hermitian_dim_cap)
        throw ContractError("eig_hermitian: dimension exceeds desk-scale cap");

    Mat work = H;
    Eigen::VectorXd evals(n);
    const int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n,
        reinterpret_cast<lapack_complex_double*>(work.data()), n, evals.data());
    check_lapack(info, "zheevd");
    if (vectors) *vectors = work;
    return evals;
}

Eigen::VectorXcd eig_general(const Mat& A, const SampleConfig& cfg) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw ContractError("eig_general: matrix must be square");
    if (!cfg.override_caps && n > cfg.general_dim_cap)
        throw ContractError("eig_general: dimension exceeds desk-scale cap");

    Mat work = A;
    Eigen::VectorXcd evals(n);
    const int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', 'N', n,
        reinterpret_cast<lapack_complex_double*>(work.data()), n,
        reinterpret_cast<lapack_complex_double*>(evals.data()), nullptr, 1,
        nullptr, 1);
    if (info > 0)
        throw std::runtime_error("zgeev: QR failed to converge at eigenvalue " +
                                 std::to_string(info));
    check_lapack(info, "zgeev");
    return evals;
}

double smallest_singular_value(const Mat& A) {
    // sigma_min via the Gram matrix: one Hermitian eigensolve of A^* A
    Mat g = A.adjoint() * A;
    const int n = static_cast<int>(g.rows());
    Eigen::VectorXd evals(n);
    const int info = LAPACKE_zheevd(
        LAPACK_COL_MAJOR, 'N', 'L', n,
        reinterpret_cast<lapack_complex_double*>(g.data()), n, evals.data());
    check_lapack(info, "zheevd");
    return std::sqrt(std::max(0.0, evals.minCoeff()));
}

namespace {

ContainmentReport containment_core(
    const KroneckerModel& model, const SampleConfig& cfg, double epsilon,
    const std::function<bool(cx, bool&)>& member_dilated) {
    ContainmentReport rep;
    for (int t = 0; t < cfg.trials; ++t) {
        Mat X = sample_model(model, cfg, t);
        Eigen::VectorXcd ev = eig_general(X, cfg);
        TrialOutliers tr;
        tr.eigenvalue_count = static_cast<int>(ev.size());
        for (int i = 0; i < ev.size(); ++i) {
            bool off_grid = false;
            if (!member_dilated(ev(i), off_grid)) {
                tr.outside++;
                tr.outliers.push_back(ev(i));
            }
            if (off_grid) rep.grid_extrapolation = true;
        }
        rep.total_outside += tr.outside;
        rep.trials.push_back(std::move(tr));
    }
    long total = 0;
    for (const auto& t : rep.trials) total += t.eigenvalue_count;
    rep.outlier_rate = total ? double(rep.total_outside) / double(total) : 0.0;
    (void)epsilon;
    return rep;
}

}  // namespace

ContainmentReport containment_report(const KroneckerModel& model,
                                     const SampleConfig& cfg, double epsilon,
                                     const OracleSpec& oracle) {
    std::function<bool(cx, bool&)> member;
    if (oracle.kind == OracleSpec::Disk) {
        member = [&](cx z, bool&) { return std::abs(z) <= oracle.radius + epsilon; };
    } else {
        member = [&](cx z, bool&) {
            if (example_oracle(oracle.zeta_points, oracle.L, z)) return true;
            // dilated membership: does the eps-disk around z reach the set?
            for (int ring = 1; ring <= 4; ++ring) {
                const double r = epsilon * ring / 4.0;
                for (int a = 0; a < 64; ++a) {
                    const double th = 2.0 * M_PI * a / 64;
                    if (example_oracle(oracle.zeta_points, oracle.L,
                                       z + cx(r * std::cos(th), r * std::sin(th))))
                        return true;
                }
            }
            return false;
        };
    }
    ContainmentReport rep = containment_core(model, cfg, epsilon, member);
    // distance bookkeeping for outsiders (analytic case: distance to the set
    // estimated by shrinking rings)
    for (auto& tr : rep.trials)
        for (cx z : tr.outliers) {
            double d = epsilon;
            if (oracle.kind == OracleSpec::Disk)
                d = std::abs(z) - oracle.radius;
            tr.max_distance = std::max(tr.max_distance, d);
        }
    return rep;
}

ContainmentReport containment_report(const KroneckerModel& model,
                                     const SampleConfig& cfg, double epsilon,
                                     const PseudospectrumGrid& grid) {
    const auto& g = grid.grid;
    const double dre = g.nre > 1 ? (g.re1 - g.re0) / (g.nre - 1) : 1;
    const double dim = g.nim > 1 ? (g.im1 - g.im0) / (g.nim - 1) : 1;
    std::function<bool(cx, bool&)> member = [&](cx z, bool& off_grid) {
        int ix = static_cast<int>(std::lround((z.real() - g.re0) / dre));
        int iy = static_cast<int>(std::lround((z.imag() - g.im0) / dim));
        if (ix < 0 || ix >= g.nre || iy < 0 || iy >= g.nim) {
            off_grid = true;  // nearest-cell extrapolation
            ix = std::clamp(ix, 0, g.nre - 1);
            iy = std::clamp(iy, 0, g.nim - 1);
        }
        return grid.member[iy * g.nre + ix] != 0;
    };
    return containment_core(model, cfg, epsilon, member);
}

GapCheckReport hermitized_gap_check(const KroneckerModel& model,
                                    const SampleConfig& cfg, cx zeta,
                                    double epsilon, const ScanOptions& opts) {
    GapCheckReport rep;
    rep.dist0_selfconsistent = dist0_selfconsistent(model, zeta, epsilon, opts);
    const int dim = model.L() * model.N();
    for (int t = 0; t < cfg.trials; ++t) {
        Mat X = sample_model(model, cfg, t);
        X -= zeta * Mat::Identity(dim, dim);
        rep.empirical.push_back(smallest_singular_value(X));
    }
    return rep;
}

double global_law_distance(const KroneckerModel& model, const SampleConfig& cfg,
                           const DosCurve& dos, int trial_index) {
    if (!is_hermitian_model(model))
        throw ContractError("global_law_distance: model must be Hermitian");
    Mat H = sample_model(model, cfg, trial_index);
    Eigen::VectorXd ev = eig_hermitian(H, cfg);
    std::sort(ev.data(), ev.data() + ev.size());

    // reference CDF: trapezoid integral of the dos curve
    const auto& E = dos.E_grid;
    const int n = static_cast<int>(E.size());
    std::vector<double> cdf(n, 0);
    for (int i = 1; i < n; ++i) {
        const double a = dos.rho[i - 1], b = dos.rho[i];
        if (!std::isfinite(a) || !std::isfinite(b))
            throw ContractError("global_law_distance: dos curve has failed points");
        cdf[i] = cdf[i - 1] + 0.5 * (a + b) * (E[i] - E[i - 1]);
    }
    auto cdf_at = [&](double x) {
        if (x <= E.front()) return 0.0;
        if (x >= E.back()) return cdf.back();
        const auto it = std::upper_bound(E.begin(), E.end(), x);
        const int i = static_cast<int>(it - E.begin());
        const double w = (x - E[i - 1]) / (E[i] - E[i - 1]);
        return cdf[i - 1] + w * (cdf[i] - cdf[i - 1]);
    };
    const double m = static_cast<double>(ev.size());
    double dist = 0;
    for (int i = 0; i < ev.size(); ++i) {
        const double f = cdf_at(ev(i));
        dist = std::max(dist, std::abs(f - double(i) / m));
        dist = std::max(dist, std::abs(f - double(i + 1) / m));
    }
    return dist;
}

}  // namespace kronmde
