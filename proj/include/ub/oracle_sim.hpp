#pragma once

// Independent checks for the bound engine: a direct simulation of the
// subcarrier chain y_i = z_i x_i + n_i, the Bayesian tracker of z_i given
// past inputs and outputs, and a quadrature evaluation of I(x; y | z_hat).

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "ub/channel_model.hpp"
#include "ub/gaussian.hpp"

namespace ub {

struct ChannelTrace {
  std::vector<Complex> z;
  std::vector<Complex> x;
  std::vector<Complex> n;
  std::vector<Complex> y;
  // Tracker state before observing index i; empty until filled by track().
  std::vector<Gaussian2> posterior;

  std::size_t size() const { return z.size(); }
};

ChannelTrace simulate(const FrequencyCorrelation& fc, double sigma_x_sq, double sigma_n_sq,
                      long long n, RandomStream& rng);

// posterior[i] = P(z_i | x_0..x_{i-1}, y_0..y_{i-1}).
std::vector<Gaussian2> track(const ChannelTrace& trace, const FrequencyCorrelation& fc,
                             double sigma_n_sq);

// CSV: schema_version,index,z_re,z_im,x_re,x_im,y_re,y_im,posterior_var
void write_trace_csv(const ChannelTrace& trace, const std::filesystem::path& path);

class QuadraturePrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureSpec {
  // |x|^2 is integrated on [0, input_extent * sigma_x^2].
  double input_extent = 40.0;
  int input_nodes = 2000;
  int radial_nodes = 400;
  // Maximum |coarse - fine| (bits) between the rule and its doubled grid.
  double tolerance = 1e-4;
};

struct MiResult {
  double bits = 0.0;
  double error_estimate = 0.0;  // |value(grid) - value(2x grid)|
};

// I(x; y | z_hat) for y = z x + n, z ~ N(mu_hat, sigma_hat_sq I),
// x ~ ZMCS(sigma_x_sq), n ~ ZMCS(sigma_n_sq). Throws
// QuadraturePrecisionError when the doubled grid moves the value by more
// than spec.tolerance.
MiResult exact_conditional_mi(double sigma_hat_sq, Complex mu_hat, double sigma_x_sq,
                              double sigma_n_sq, const QuadratureSpec& spec = {});

}  // namespace ub
