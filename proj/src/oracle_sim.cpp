#include "ub/oracle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "ub/quadrature.hpp"
#include "ub/special.hpp"

namespace ub {

ChannelTrace simulate(const FrequencyCorrelation& fc, double sigma_x_sq, double sigma_n_sq,
                      long long n, RandomStream& rng) {
  if (n < 0) throw std::invalid_argument("simulate: length must be >= 0");
  if (!(sigma_x_sq >= 0.0 && sigma_n_sq >= 0.0)) {
    throw std::invalid_argument("simulate: variances must be >= 0");
  }
  ChannelTrace t;
  const auto len = static_cast<std::size_t>(n);
  t.z.reserve(len);
  t.x.reserve(len);
  t.n.reserve(len);
  t.y.reserve(len);
  const ZmcsGaussian input{sigma_x_sq};
  const ZmcsGaussian noise{sigma_n_sq};
  for (std::size_t i = 0; i < len; ++i) {
    const Complex z = i == 0 ? sample_zmcs(ZmcsGaussian{fc.sigma_z_sq}, rng)
                             : to_complex(sample(conditional_response(fc, t.z.back()), rng));
    const Complex x = sample_zmcs(input, rng);
    const Complex w = sample_zmcs(noise, rng);
    t.z.push_back(z);
    t.x.push_back(x);
    t.n.push_back(w);
    t.y.push_back(z * x + w);
  }
  return t;
}

std::vector<Gaussian2> track(const ChannelTrace& trace, const FrequencyCorrelation& fc,
                             double sigma_n_sq) {
  std::vector<Gaussian2> post;
  if (trace.size() == 0) return post;
  post.reserve(trace.size());
  post.push_back(ZmcsGaussian{fc.sigma_z_sq}.as_gaussian());
  const Mat2 a = to_matrix(fc.a).matrix();
  const double innovation = fc.sigma_z_sq * fc.one_minus_a_sq;
  const double a_sq = fc.a_sq();
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const Gaussian2& prior = post.back();
    const Complex x = trace.x[i - 1];
    const double x_sq = std::norm(x);
    // Measurement update: z_{i-1} | (x, y) looks like N(y/x, sigma_n^2/|x|^2 I).
    Gaussian2 updated;
    if (x_sq == 0.0) {
      updated = fuse(prior, Uninformative{});
    } else if (sigma_n_sq == 0.0) {
      updated = Gaussian2{to_vec(trace.y[i - 1] / x), Mat2{}};
    } else {
      updated = fuse(prior, Gaussian2::isotropic(to_vec(trace.y[i - 1] / x), sigma_n_sq / x_sq));
    }
    // Prediction through the Gauss-Markov step.
    Gaussian2 next;
    next.mean = a * updated.mean;
    next.cov = a_sq * updated.cov + Mat2::scaled_identity(innovation);
    post.push_back(next);
  }
  return post;
}

void write_trace_csv(const ChannelTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "schema_version,index,z_re,z_im,x_re,x_im,y_re,y_im,posterior_var\n";
  char buf[512];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double var = i < trace.posterior.size() ? trace.posterior[i].cov.m00 : std::nan("");
    std::snprintf(buf, sizeof buf, "1,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i,
                  trace.z[i].real(), trace.z[i].imag(), trace.x[i].real(), trace.x[i].imag(),
                  trace.y[i].real(), trace.y[i].imag(), var);
    out << buf;
  }
}

namespace {

constexpr int kPanelOrder = 10;

// Value of I(x; y | z_hat) with a given pair of grid sizes.
double conditional_mi_on_grid(double sigma_hat_sq, double mu_abs, double sigma_x_sq,
                              double sigma_n_sq, const QuadratureSpec& spec, int input_nodes,
                              int radial_nodes) {
  // Input magnitude s = |x|^2 ~ Exp(mean 2 sigma_x^2); phase uniform.
  const double s_max = spec.input_extent * sigma_x_sq;
  const int input_panels = std::max(1, input_nodes / kPanelOrder);
  const QuadratureRule input = composite_gauss_legendre(0.0, s_max, input_panels, kPanelOrder);
  const std::size_t k_count = input.nodes.size();
  std::vector<double> weight(k_count), offset(k_count), var(k_count);
  double total_weight = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double s = input.nodes[k];
    weight[k] = input.weights[k] * std::exp(-s / (2.0 * sigma_x_sq)) / (2.0 * sigma_x_sq);
    offset[k] = mu_abs * std::sqrt(s);
    var[k] = s * sigma_hat_sq + sigma_n_sq;
    total_weight += weight[k];
  }
  double cond_entropy = 0.0;  // h(y | x, z_hat), bits
  std::vector<double> log_coeff(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    weight[k] /= total_weight;
    cond_entropy += weight[k] * std::log2(2.0 * std::numbers::pi * std::numbers::e * var[k]);
    log_coeff[k] = std::log(weight[k]) - std::log(2.0 * std::numbers::pi * var[k]);
  }

  // Output density is circularly symmetric in y; integrate over rho = |y|.
  const double var_max = s_max * sigma_hat_sq + sigma_n_sq;
  const double rho_max = mu_abs * std::sqrt(s_max) + 12.0 * std::sqrt(var_max);
  const int radial_panels = std::max(1, radial_nodes / kPanelOrder);
  const QuadratureRule radial = composite_gauss_legendre(0.0, rho_max, radial_panels, kPanelOrder);

  std::vector<double> terms(k_count);
  double out_entropy = 0.0;  // h(y | z_hat), nats
  for (std::size_t r = 0; r < radial.nodes.size(); ++r) {
    const double rho = radial.nodes[r];
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_count; ++k) {
      const double d = rho - offset[k];
      // Phase-averaged Gaussian: e^{-(rho^2 + m^2)/2v} I0(rho m / v)
      //   = e^{-(rho - m)^2/2v} * [I0(z) e^{-z}],  z = rho m / v.
      const double z = rho * offset[k] / var[k];
      terms[k] = log_coeff[k] - d * d / (2.0 * var[k]) + (log_bessel_i0(z) - z);
      peak = std::max(peak, terms[k]);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) acc += std::exp(terms[k] - peak);
    const double log_p = peak + std::log(acc);
    out_entropy -= radial.weights[r] * 2.0 * std::numbers::pi * rho * std::exp(log_p) * log_p;
  }
  return out_entropy / std::numbers::ln2 - cond_entropy;
}

}  // namespace

MiResult exact_conditional_mi(double sigma_hat_sq, Complex mu_hat, double sigma_x_sq,
                              double sigma_n_sq, const QuadratureSpec& spec) {
  if (!(sigma_hat_sq >= 0.0 && sigma_x_sq >= 0.0)) {
    throw std::invalid_argument("exact_conditional_mi: variances must be >= 0");
  }
  if (!(sigma_n_sq > 0.0)) throw std::invalid_argument("exact_conditional_mi: noise variance must be > 0");
  if (sigma_x_sq == 0.0) return {0.0, 0.0};
  // Rotating mu_hat onto the real axis leaves the MI unchanged (x has a
  // uniform phase), so only |mu_hat| enters.
  const double mu_abs = std::abs(mu_hat);
  const double coarse = conditional_mi_on_grid(sigma_hat_sq, mu_abs, sigma_x_sq, sigma_n_sq, spec,
                                               spec.input_nodes, spec.radial_nodes);
  const double fine = conditional_mi_on_grid(sigma_hat_sq, mu_abs, sigma_x_sq, sigma_n_sq, spec,
                                             2 * spec.input_nodes, 2 * spec.radial_nodes);
  const double err = std::abs(fine - coarse);
  if (err > spec.tolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "exact_conditional_mi: grid doubling moved the value by %.3g bits (tolerance %.3g)",
                  err, spec.tolerance);
    throw QuadraturePrecisionError(buf);
  }
  return {fine, err};
}

}  // namespace ub
