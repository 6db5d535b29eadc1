#pragma once
#include <string>

#include "kronmde/model.hpp"

namespace kronmde {

// JSON schema (complex scalars are [re, im] pairs, matrices are row arrays):
//   { "L", "N", "ell",
//     "alpha_tilde": [...], "beta_tilde": [...], "gamma_tilde": [...],
//     "variances": {"kind": "flat"|"banded"|"explicit", ...},
//     "a_tilde": [...], "kappa": {"k1","k2","k3"} }
// parse_model throws ContractError naming the offending field.
KroneckerModel parse_model(const std::string& json_text);
std::string serialize_model(const KroneckerModel& model);

KroneckerModel load_model_file(const std::string& path);
void save_model_file(const KroneckerModel& model, const std::string& path);

// FNV-1a over the canonical serialization; stable content identity for
// output provenance headers.
std::string model_hash(const KroneckerModel& model);

// Built-in generators matching the verification suite:
//   wigner ginibre fig1a fig1b fig1c fig1d two-band
KroneckerModel make_preset(const std::string& name, int N);
std::vector<std::string> preset_names();

// The expectation spectrum {zeta_i} for models whose limiting spectrum has
// the closed form sum_i 1/|zeta_i - zeta|^2 >= L: flat variances, zero alpha
// structure, beta structure spanning all matrix units at equal weight, and a
// constant diagonal expectation.  Empty optional if the model is not of this
// shape.
std::optional<std::vector<cx>> example_zeta_set(const KroneckerModel& model);

}  // namespace kronmde
