#pragma once
#include <optional>
#include <vector>

#include "kronmde/types.hpp"

namespace kronmde {

// Deterministic L x L structure matrices.  The same count ell applies to the
// alpha (Hermitian-coupled) and beta/gamma (independent-coupled) families;
// unused families are zero matrices.
struct StructureSet {
    int L = 1;
    int ell = 1;
    std::vector<Mat> alpha_tilde;  // ell matrices, L x L
    std::vector<Mat> beta_tilde;   // ell matrices, L x L
    std::vector<Mat> gamma_tilde;  // ell matrices, L x L
};

enum class VarianceKind { Flat, Banded, Explicit };

// Variance profiles s^mu (symmetric, for the Hermitian families) and t^nu
// (for the independent families).  Flat and banded profiles are stored as
// per-family scales and evaluated lazily; explicit profiles store the full
// N x N arrays.
struct VarianceProfile {
    int N = 1;
    VarianceKind kind = VarianceKind::Flat;
    std::vector<double> s_scale, t_scale;          // Flat / Banded
    int width = 0;                                 // Banded
    std::vector<Eigen::MatrixXd> s_full, t_full;   // Explicit

    double s(int fam, int i, int j) const {
        switch (kind) {
            case VarianceKind::Flat: return s_scale[fam];
            case VarianceKind::Banded: return std::abs(i - j) <= width ? s_scale[fam] : 0.0;
            default: return s_full[fam](i, j);
        }
    }
    double t(int fam, int i, int j) const {
        switch (kind) {
            case VarianceKind::Flat: return t_scale[fam];
            case VarianceKind::Banded: return std::abs(i - j) <= width ? t_scale[fam] : 0.0;
            default: return t_full[fam](i, j);
        }
    }
    bool is_flat() const { return kind == VarianceKind::Flat; }
};

// Deterministic expectation: a block-diagonal of L x L matrices, one per
// inner index i.
struct ExpectationDiagonal {
    std::vector<Mat> a_tilde;  // N matrices, L x L
};

struct Kappa {
    double k1 = 10, k2 = 10, k3 = 10;
};

struct KroneckerModel {
    StructureSet structure;
    VarianceProfile variances;
    ExpectationDiagonal expectation;
    Kappa kappa;

    int L() const { return structure.L; }
    int N() const { return variances.N; }
    int ell() const { return structure.ell; }
};

// Dimension problems and bound violations are reported separately: the former
// make the model unusable, the latter just break the advertised constants.
struct ValidationReport {
    std::vector<std::string> dimension_errors;
    std::vector<std::string> bound_violations;
    bool ok() const { return dimension_errors.empty() && bound_violations.empty(); }
};

ValidationReport validate(const KroneckerModel& model);

// True iff the model is Hermitian as a matrix: alpha_tilde Hermitian,
// gamma_tilde = beta_tilde^*, a_tilde Hermitian.
bool is_hermitian_model(const KroneckerModel& model);

// Data for the Hermitian Dyson equation: K x K structure matrices alpha
// (Hermitian) and beta (paired with beta^*), expectation diagonal a_j, and
// the variance profiles shared with the originating model.
struct HermitianDysonData {
    int K = 1;
    int N = 1;
    int ell = 1;
    std::vector<Mat> a;      // N matrices, K x K
    std::vector<Mat> alpha;  // ell Hermitian K x K
    std::vector<Mat> beta;   // ell K x K
    VarianceProfile var;
};

// Girko Hermitization at spectral point zeta: doubles the structure dimension
// (K = 2L) and folds zeta into the expectation.
HermitianDysonData hermitize(const KroneckerModel& model, cx zeta);

// Hermitian models (is_hermitian_model) can be solved without doubling:
// K = L, the families carry over directly.
HermitianDysonData direct_dyson_data(const KroneckerModel& model);

// H^zeta = [[0, X - zeta],[X^* - conj(zeta), 0]]: Hermitian by construction,
// spectrum symmetric about 0, dist(0, spec) = sigma_min(X - zeta).
Mat hermitized_matrix(const Mat& X, cx zeta);

// H^zeta assembled from given family samples X_mu (Hermitian), Y_nu.
// Layout: entry ((p-1)N+i, (q-1)N+j) = structure[p,q] * random[i,j].
Mat assemble_hermitized_sample(const HermitianDysonData& data,
                               const std::vector<Mat>& X,
                               const std::vector<Mat>& Y);

// When the variance profiles are flat and the expectation diagonal takes G
// distinct values in equal-sized groups, the Dyson solution is constant on
// each group (uniqueness), so scans may solve a G-block problem instead of N.
struct UniformReduction {
    HermitianDysonData reduced;              // N = G
    std::vector<int> group_of;               // original j -> group index
    std::vector<int> group_size;             // all equal
};
std::optional<UniformReduction> reduce_uniform(const HermitianDysonData& data);

}  // namespace kronmde
