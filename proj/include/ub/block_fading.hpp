#pragma once

// OFDM block-fading parameterization: subcarrier grid, energy lost to
// prefix truncation, the SNR adjustment for energy outside the block model,
// and the cyclic-prefix rate penalty.

#include <stdexcept>
#include <string>

#include "ub/channel_model.hpp"

namespace ub {

class GridError : public std::invalid_argument {
 public:
  GridError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct OfdmConfig {
  double bandwidth_hz = 0.0;       // W
  double block_length_s = 0.0;     // T_B
  double cyclic_prefix_s = 0.0;    // T_t
  long long subcarriers = 0;       // N = W T_B
  double spacing_hz = 0.0;         // 1 / T_B
};

// Throws GridError when W*T_B or W*T_t is not an integer (1e-6 relative).
OfdmConfig derive_grid(double bandwidth_hz, double block_length_s, double cyclic_prefix_s);

// Fraction of a unit-energy exponential profile lying beyond the prefix.
double truncation_energy(double tau_c, double cyclic_prefix_s);

// General profile: 1 - retained fraction after truncating at the prefix.
double truncation_energy(const PowerDelayProfile& pdp, double cyclic_prefix_s);

// SNR' = snr*eta*(1-e) / (1 + snr*(1 - eta*(1-e))).
double adjust_snr(double snr, double coherence_fraction, double e_trunc);

struct SnrBudget {
  double snr_raw = 0.0;
  double coherence_fraction = 1.0;
  double trunc_energy = 0.0;

  double snr_adjusted() const { return adjust_snr(snr_raw, coherence_fraction, trunc_energy); }
};

// rate * T_B / (T_B + T_t).
double cp_penalty(double rate, double block_length_s, double cyclic_prefix_s);

}  // namespace ub
