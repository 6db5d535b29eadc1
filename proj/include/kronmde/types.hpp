#pragma once
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>
#include <Eigen/Dense>

namespace kronmde {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline constexpr const char* version_string = "kronmde 0.1.0";

// Contract violations (bad dimensions, non-Hermitian input where Hermitian is
// required, ...) throw this; numerical trouble is reported through flags on
// the result structs instead.
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A block-diagonal element of the solution space: one K x K matrix per inner
// index j = 0..N-1.  The inner product is the normalized trace pairing
// <R,T> = (1/(N K)) sum_j tr(R_j^* T_j).
struct BlockVector {
    int N = 0;
    int K = 0;
    std::vector<Mat> b;

    BlockVector() = default;
    BlockVector(int N_, int K_) : N(N_), K(K_), b(N_, Mat::Zero(K_, K_)) {}

    static BlockVector zero(int N, int K) { return BlockVector(N, K); }
    static BlockVector identity(int N, int K) {
        BlockVector v(N, K);
        for (auto& m : v.b) m = Mat::Identity(K, K);
        return v;
    }
    static BlockVector constant(int N, const Mat& m) {
        BlockVector v(N, static_cast<int>(m.rows()));
        for (auto& x : v.b) x = m;
        return v;
    }

    double hs_norm() const {
        double s = 0;
        for (const auto& m : b) s += m.squaredNorm();
        return std::sqrt(s / (double(N) * double(K)));
    }
    double hs_inner_with(const BlockVector& o) const {  // real part of <this,o>
        double s = 0;
        for (int j = 0; j < N; ++j)
            s += (b[j].adjoint() * o.b[j]).trace().real();
        return s / (double(N) * double(K));
    }
    double max_spectral_norm() const {
        double s = 0;
        for (const auto& m : b)
            s = std::max(s, m.jacobiSvd().singularValues()(0));
        return s;
    }
    // min over j of the smallest eigenvalue of (b_j - b_j^*)/(2i)
    double min_im_eig() const {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& m : b) {
            Mat im = (m - m.adjoint()) / cx(0, 2);
            Eigen::SelfAdjointEigenSolver<Mat> es(im, Eigen::EigenvaluesOnly);
            v = std::min(v, es.eigenvalues().minCoeff());
        }
        return v;
    }
    BlockVector& operator+=(const BlockVector& o) {
        for (int j = 0; j < N; ++j) b[j] += o.b[j];
        return *this;
    }
    BlockVector& operator-=(const BlockVector& o) {
        for (int j = 0; j < N; ++j) b[j] -= o.b[j];
        return *this;
    }
    BlockVector& operator*=(cx a) {
        for (auto& m : b) m *= a;
        return *this;
    }
    friend BlockVector operator-(BlockVector a, const BlockVector& c) { return a -= c; }
    friend BlockVector operator+(BlockVector a, const BlockVector& c) { return a += c; }
};

inline double spectral_norm(const Mat& m) {
    return m.jacobiSvd().singularValues()(0);
}

inline bool is_hermitian(const Mat& m, double tol = 1e-12) {
    return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

}  // namespace kronmde
