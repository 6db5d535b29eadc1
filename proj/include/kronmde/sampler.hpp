#pragma once
#include "kronmde/model.hpp"
#include "kronmde/spectrum.hpp"

namespace kronmde {

enum class Distribution { ComplexGaussian, RealGaussian, Rademacher };

struct SampleConfig {
    uint64_t seed = 1;
    Distribution distribution = Distribution::ComplexGaussian;
    int trials = 1;
    // desk-scale guard rails on eigensolver dimension, overridable
    int hermitian_dim_cap = 4000;
    int general_dim_cap = 2000;
    bool override_caps = false;
};

struct FamilySamples {
    std::vector<Mat> X;  // Hermitian families
    std::vector<Mat> Y;  // independent families
};

// Entry streams are addressed (seed, family, trial, i, j), so every matrix is
// a pure function of (model, cfg.seed, trial_index), bitwise reproducible
// under any execution order.
FamilySamples sample_families(const KroneckerModel& model, const SampleConfig& cfg,
                              int trial_index);

// Assembled LN x LN sample of the model itself
Mat sample_model(const KroneckerModel& model, const SampleConfig& cfg, int trial_index);

// Ascending eigenvalues; requires ||H - H^*|| <= 1e-10 ||H||.
Eigen::VectorXd eig_hermitian(const Mat& H, const SampleConfig& cfg = {},
                              Mat* vectors = nullptr);

// All eigenvalues of a general square matrix.
Eigen::VectorXcd eig_general(const Mat& A, const SampleConfig& cfg = {});

// dist(0, spec H^zeta) = sigma_min(X - zeta), computed on the half dimension.
double smallest_singular_value(const Mat& A);

struct TrialOutliers {
    int eigenvalue_count = 0;
    int outside = 0;
    double max_distance = 0;  // distance to the member set among outsiders
    std::vector<cx> outliers;
};

struct ContainmentReport {
    std::vector<TrialOutliers> trials;
    int total_outside = 0;
    double outlier_rate = 0;
    bool grid_extrapolation = false;  // some eigenvalue fell off the grid
};

// membership given analytically...
struct OracleSpec {
    enum Kind { ExampleSet, Disk } kind = ExampleSet;
    std::vector<cx> zeta_points;  // ExampleSet
    double L = 1;
    double radius = 1;            // Disk
};

// ...or by a computed pseudospectrum grid (nearest-cell lookup; eigenvalues
// beyond the grid use the nearest cell and set grid_extrapolation).
ContainmentReport containment_report(const KroneckerModel& model,
                                     const SampleConfig& cfg, double epsilon,
                                     const OracleSpec& oracle);
ContainmentReport containment_report(const KroneckerModel& model,
                                     const SampleConfig& cfg, double epsilon,
                                     const PseudospectrumGrid& grid);

struct GapCheckReport {
    double dist0_selfconsistent = 0;
    std::vector<double> empirical;  // sigma_min(X - zeta) per trial
};

GapCheckReport hermitized_gap_check(const KroneckerModel& model,
                                    const SampleConfig& cfg, cx zeta,
                                    double epsilon, const ScanOptions& opts = {});

// Kolmogorov distance between the empirical spectral CDF of one sample and
// the CDF integrated from the dos curve.
double global_law_distance(const KroneckerModel& model, const SampleConfig& cfg,
                           const DosCurve& dos, int trial_index = 0);

}  // namespace kronmde
