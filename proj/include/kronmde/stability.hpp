#pragma once
#include "kronmde/solver.hpp"

namespace kronmde {

// Diagnostics around the stability operator L[r] = r - M S[r] M at a solved
// point.  W, U, T are the block-diagonal factors of the saturated
// decomposition; F is the top eigenvector of the symmetrized operator.
struct StabilityDiagnostics {
    double norm_S_max = 0;    // max_i ||S_i[Id]||
    double norm_S_hs = 0;     // hs operator norm estimate of F-op (|F| <= 1)
    double norm_F = 0;        // top eigenvalue of the F operator
    double gap_F = 0;         // 1 - norm_F
    double gap_identity_residual = 0;  // relative defect of the gap identity
    int power_iterations = 0;
    BlockVector F, W, U, T;
};

// Dense matrix of L in the standard block basis (column = vec of a matrix
// unit); only permitted while N K^2 <= 4096.
Eigen::MatrixXcd materialize_stability_operator(const HermitianDysonData& data,
                                                const BlockVector& m, cx z);

// 1 / sigma_min of the materialized stability operator (the hs -> hs inverse
// norm); sigma_min below 1e-14 is treated as singular.
double linv_norm_hs(const HermitianDysonData& data, const BlockVector& m, cx z);

// Power iteration for the symmetrized positivity-preserving operator
//   F = C_W C_{sqrt Im M} S C_{sqrt Im M} C_W,
// plus the spectral-gap identity
//   1 - |F| = Im z <F, W Im M W> / <F, |T|^{-1}>.
// Requires min eig Im m > 1e-13.
StabilityDiagnostics f_operator_analysis(const HermitianDysonData& data,
                                         const MdeSolution& sol);

// Relative defect of the operator identity
//   L = C_{sqrt Im M} C_W C_{U^*} (C_U - F) C_W^{-1} C_{sqrt Im M}^{-1}
// on random block-diagonal inputs; returns the worst over the trials.
double verify_decomposition(const HermitianDysonData& data, const MdeSolution& sol,
                            int trials, uint64_t seed);

}  // namespace kronmde
