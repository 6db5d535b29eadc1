#pragma once
#include "kronmde/model.hpp"

namespace kronmde {

// The self-energy superoperator
//   S_i[r] = sum_k [ sum_mu s^mu_ik alpha_mu r_k alpha_mu
//                  + sum_nu ( t^nu_ik beta_nu r_k beta_nu^*
//                           + t^nu_ki beta_nu^* r_k beta_nu ) ].
// Linear, positivity-preserving, and self-adjoint for the normalized trace
// pairing.  Construction detects two cheap shapes: flat profiles (one shared
// row) and the matrix-unit beta family of the example models (trace form).
class SelfEnergy {
  public:
    explicit SelfEnergy(const HermitianDysonData& data);

    void apply(const BlockVector& r, BlockVector& out) const;
    BlockVector operator()(const BlockVector& r) const {
        BlockVector out(d_->N, d_->K);
        apply(r, out);
        return out;
    }
    const HermitianDysonData& data() const { return *d_; }

  private:
    const HermitianDysonData* d_;
    bool flat_ = false;
    bool unit_trace_form_ = false;  // hermitized all-matrix-units beta family
    double unit_scale_ = 0;
    int half_ = 0;                  // L = K/2 for the trace form
    void apply_flat_shared(const BlockVector& r, Mat& shared) const;
};

BlockVector apply_self_energy(const HermitianDysonData& data, const BlockVector& r);

// max_i || S_i[Id] ||; for positivity-preserving maps this is the exact
// operator norm for the spectral max-norm, and it obeys
// norm <= 3 ell kappa1 kappa2^2 under the model bounds.
double norm_self_energy_max(const HermitianDysonData& data);

// max over random trials of |<R, S[T]> - <S[R], T>| / (|R| |T|)
double self_adjoint_defect(const HermitianDysonData& data, int trials, uint64_t seed);

}  // namespace kronmde
