#pragma once

// Power delay profiles and the Gauss-Markov description of the subcarrier
// response chain: z_i | z_{i-1} ~ N(A z_{i-1}, sigma_z^2 (1 - |a|^2) I).

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ub/gaussian.hpp"

namespace ub {

class ChannelModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// P(tau) = amplitude * exp(-tau / tau_c). amplitude = 1/tau_c is unit energy.
struct ExponentialPdp {
  double tau_c = 0.0;
  double amplitude = 1.0;
};

// Piecewise-linear density through (delays[k], densities[k]); zero outside
// [delays.front(), delays.back()].
struct TabulatedPdp {
  std::vector<double> delays;
  std::vector<double> densities;
};

class PowerDelayProfile {
 public:
  using Kind = std::variant<ExponentialPdp, TabulatedPdp>;

  static PowerDelayProfile exponential(double tau_c, double amplitude = -1.0);
  static PowerDelayProfile tabulated(std::vector<double> delays, std::vector<double> densities);

  const Kind& kind() const { return kind_; }
  // Truncation point; nullopt means untruncated.
  std::optional<double> truncation() const { return truncation_; }

  bool is_exponential() const { return std::holds_alternative<ExponentialPdp>(kind_); }

  // Density at delay tau (zero at and beyond the truncation point).
  double density(double tau) const;

  // Energy on [0, tau_t) ignoring truncation (tau_t may be +inf).
  double energy_below(double tau_t) const;

  // Energy of the (possibly truncated) profile.
  double energy() const;

  // Support end: truncation point, last tabulated delay, or +inf.
  double support_end() const;

  // Copy with the profile zeroed on [tau_t, inf); tabulated rows past tau_t
  // are dropped and a closing row is interpolated at tau_t.
  PowerDelayProfile truncated_at(double tau_t) const;

 private:
  PowerDelayProfile(Kind kind, std::optional<double> truncation)
      : kind_(std::move(kind)), truncation_(truncation) {}

  Kind kind_;
  std::optional<double> truncation_;
};

struct TruncationResult {
  PowerDelayProfile profile;
  double retained_fraction;
};

// Zero the profile on [tau_t, inf). tau_t = +inf leaves it unchanged.
TruncationResult truncate(const PowerDelayProfile& pdp, double tau_t);

// sigma_z^2 = \int P'(tau) dtau (per real component).
double response_variance(const PowerDelayProfile& pdp);

enum class SpacingConvention {
  cyclic,      // exponent 2*pi*df*tau
  paper_table  // exponent df*tau
};

std::string to_string(SpacingConvention c);
SpacingConvention parse_convention(const std::string& s);

// Angular argument theta multiplying tau in the exponent.
double spacing_theta(double df, SpacingConvention conv);

// a = \int P'(tau) e^{-j theta tau} dtau / \int P'(tau) dtau.
Complex correlation_a(const PowerDelayProfile& pdp, double df, SpacingConvention conv);

// 1 - |a|^2, evaluated without cancellation for the exponential profile.
double decorrelation(const PowerDelayProfile& pdp, double df, SpacingConvention conv);

struct FrequencyCorrelation {
  Complex a{1.0, 0.0};
  double sigma_z_sq = 0.0;
  // 1 - |a|^2, carried separately so values near 1e-11 keep full precision.
  double one_minus_a_sq = 0.0;

  static FrequencyCorrelation from(Complex a, double sigma_z_sq);
  static FrequencyCorrelation from_profile(const PowerDelayProfile& pdp, double df,
                                           SpacingConvention conv);

  double a_sq() const { return std::norm(a); }
};

Gaussian2 conditional_response(const FrequencyCorrelation& fc, Complex z_prev);

using Mat4 = std::array<std::array<double, 4>, 4>;

// Covariance of [z(w); z(w - dw)] in real-vector form.
Mat4 joint_pair_covariance(const FrequencyCorrelation& fc);

// Two-column CSV (delay_seconds, density_per_second), header row required.
PowerDelayProfile read_tabulated_pdp(const std::filesystem::path& path);

}  // namespace ub
