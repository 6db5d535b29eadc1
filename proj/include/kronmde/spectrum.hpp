#pragma once
#include "kronmde/model.hpp"
#include "kronmde/solver.hpp"

namespace kronmde {

// Options shared by the eta-floor scans.  growth_threshold is the raw
// support-scan cut on max_j ||Im m_j|| / eta; membership growth thresholds
// (1/epsilon) are derived per call.
struct ScanOptions {
    double eta_floor = 1e-5;
    double growth_threshold = 50;
    double step = 0;  // dist0 scan step; 0 means epsilon/4
    SolverOptions solver;
    bool allow_reduction = true;
    int threads = 1;
};

struct DosCurve {
    std::vector<double> E_grid;
    double eta = 0;
    std::vector<double> rho;               // NaN where the solve failed
    std::vector<double> max_im_over_eta;
    std::vector<double> dist_certificates;  // sqrt(eta/(pi rho)) where rho > 0
    bool any_failed = false;
};

struct SupportEstimate {
    std::vector<std::pair<double, double>> intervals;
    double eta_floor = 0;
    std::pair<double, double> bracket{0, 0};
};

struct GridSpec {
    double re0 = 0, re1 = 0;
    int nre = 1;
    double im0 = 0, im1 = 0;
    int nim = 1;
    int size() const { return nre * nim; }
    cx at(int p) const {
        const int ix = p % nre, iy = p / nre;
        const double re = nre > 1 ? re0 + (re1 - re0) * ix / (nre - 1) : re0;
        const double im = nim > 1 ? im0 + (im1 - im0) * iy / (nim - 1) : im0;
        return {re, im};
    }
};

struct PseudospectrumGrid {
    GridSpec grid;
    double epsilon = 0;
    double eta_floor = 0;
    double growth_threshold = 0;   // raw scan threshold used for dist0
    double tilde_threshold = 0;    // 1/epsilon
    std::vector<double> dist0;     // +inf when no IN point found within the cap
    std::vector<uint8_t> member;        // dist0 <= epsilon
    std::vector<uint8_t> member_tilde;  // growth at the floor >= 1/epsilon
    std::vector<uint8_t> unknown;       // solver failure; counted as member
};

double rho_at(const HermitianDysonData& data, cx z, const ScanOptions& opts = {});

// Warm-started left-to-right sweep at fixed eta.
DosCurve dos_curve(const HermitianDysonData& data, double e_min, double e_max,
                   int points, double eta, const ScanOptions& opts = {});

// [min spec - 2 sqrt(|S|), max spec + 2 sqrt(|S|)] over the union of spec(a_j);
// requires Hermitian a_j.
std::pair<double, double> support_bracket(const HermitianDysonData& data);

SupportEstimate estimate_support(const HermitianDysonData& data, double e_min,
                                 double e_max, double step,
                                 const ScanOptions& opts = {});

// dist(0, supp rho^zeta): hermitize at zeta, scan E >= 0 (chiral symmetry) in
// steps of epsilon/4, classify by the growth criterion descending to the eta
// floor (early IN exit is sound: the growth statistic is monotone as eta
// decreases), return the smallest IN lattice point, +inf if none <= cap.
double dist0_selfconsistent(const KroneckerModel& model, cx zeta, double epsilon,
                            const ScanOptions& opts = {});

PseudospectrumGrid pseudospectrum(const KroneckerModel& model, const GridSpec& grid,
                                  double epsilon, const ScanOptions& opts = {});

// closed-form membership sum_i 1/|zeta_i - zeta|^2 >= L (poles and equality
// count as inside)
bool example_oracle(const std::vector<cx>& zeta_points, double L, cx zeta);

// true iff the oracle boundary {sum = L} meets the closed disk of radius
// dist around zeta (detected by sign sampling on concentric rings)
bool oracle_boundary_within(const std::vector<cx>& zeta_points, double L, cx zeta,
                            double dist);

struct TildeReport {
    PseudospectrumGrid scan;           // member at sqrt(eps), tilde at eps
    int interior_violations = 0;
    int boundary_violations = 0;       // within one grid step of the mask edge
    std::vector<int> violation_indices;
};

// Checks the inclusion {tilde member at eps} subseteq {member at sqrt(eps)}
// pointwise; mask-boundary points are tallied separately.
TildeReport check_tilde_inclusion(const KroneckerModel& model, const GridSpec& grid,
                                  double epsilon, const ScanOptions& opts = {});

}  // namespace kronmde
