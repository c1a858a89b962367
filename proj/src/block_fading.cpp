#include "ub/block_fading.hpp"

#include <cmath>

namespace ub {

namespace {

constexpr double kGridTol = 1e-6;

bool near_integer(double v) {
  return std::abs(v - std::round(v)) <= kGridTol * std::max(1.0, std::abs(v));
}

}  // namespace

OfdmConfig derive_grid(double bandwidth_hz, double block_length_s, double cyclic_prefix_s) {
  if (!(bandwidth_hz > 0.0)) throw GridError("bandwidth", "bandwidth must be > 0");
  if (!(block_length_s > 0.0)) throw GridError("block_length", "block length must be > 0");
  if (!(cyclic_prefix_s >= 0.0)) throw GridError("cyclic_prefix", "cyclic prefix must be >= 0");
  const double wtb = bandwidth_hz * block_length_s;
  const double wtt = bandwidth_hz * cyclic_prefix_s;
  if (!near_integer(wtb) || std::round(wtb) < 1.0) {
    throw GridError("block_length", "W*T_B = " + std::to_string(wtb) + " is not a positive integer");
  }
  if (!near_integer(wtt)) {
    throw GridError("cyclic_prefix", "W*T_t = " + std::to_string(wtt) + " is not an integer");
  }
  return {bandwidth_hz, block_length_s, cyclic_prefix_s, std::llround(wtb), 1.0 / block_length_s};
}

double truncation_energy(double tau_c, double cyclic_prefix_s) {
  if (!(tau_c > 0.0)) throw std::invalid_argument("truncation_energy: tau_c must be > 0");
  if (!(cyclic_prefix_s >= 0.0)) {
    throw std::invalid_argument("truncation_energy: cyclic prefix must be >= 0");
  }
  return std::exp(-cyclic_prefix_s / tau_c);
}

double truncation_energy(const PowerDelayProfile& pdp, double cyclic_prefix_s) {
  if (cyclic_prefix_s == 0.0) return 1.0;
  return 1.0 - truncate(pdp, cyclic_prefix_s).retained_fraction;
}

double adjust_snr(double snr, double coherence_fraction, double e_trunc) {
  if (!(snr >= 0.0)) throw std::invalid_argument("adjust_snr: snr must be >= 0");
  if (!(coherence_fraction > 0.0 && coherence_fraction <= 1.0)) {
    throw std::invalid_argument("adjust_snr: coherence fraction must be in (0, 1]");
  }
  if (!(e_trunc >= 0.0 && e_trunc < 1.0)) {
    throw std::invalid_argument("adjust_snr: truncation energy must be in [0, 1)");
  }
  const double kept = coherence_fraction * (1.0 - e_trunc);
  if (kept == 1.0) return snr;
  return snr * kept / (1.0 + snr * (1.0 - kept));
}

double cp_penalty(double rate, double block_length_s, double cyclic_prefix_s) {
  if (!(rate >= 0.0)) throw std::invalid_argument("cp_penalty: rate must be >= 0");
  return rate * block_length_s / (block_length_s + cyclic_prefix_s);
}

}  // namespace ub
