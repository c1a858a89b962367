#include "ub/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace ub {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// phi1(w) = (1 - e^{-w}) / w,  phi2(w) = (1 - e^{-w}(1 + w)) / w^2.
// Series near zero avoids cancellation.
Complex phi1(Complex w) {
  if (std::abs(w) < 0.5) {
    Complex term{1.0, 0.0};
    Complex sum = term;
    for (int k = 1; k < 30; ++k) {
      term *= -w / static_cast<double>(k + 1);
      sum += term;
    }
    return sum;
  }
  return (1.0 - std::exp(-w)) / w;
}

Complex phi2(Complex w) {
  if (std::abs(w) < 0.5) {
    // sum_k (-w)^k (k+1)/(k+2)!
    Complex power{1.0, 0.0};
    double factorial = 2.0;
    Complex sum = 0.5;
    for (int k = 1; k < 30; ++k) {
      power *= -w;
      factorial *= (k + 2);
      sum += power * (static_cast<double>(k + 1) / factorial);
    }
    return sum;
  }
  return (1.0 - std::exp(-w) * (1.0 + w)) / (w * w);
}

// Exact integral of the piecewise-linear density times e^{-j theta tau}.
Complex tabulated_transform(const TabulatedPdp& t, double theta) {
  Complex total{0.0, 0.0};
  const Complex s{0.0, theta};
  for (std::size_t k = 0; k + 1 < t.delays.size(); ++k) {
    const double t0 = t.delays[k];
    const double h = t.delays[k + 1] - t.delays[k];
    const double p0 = t.densities[k];
    const double p1 = t.densities[k + 1];
    const Complex w = s * h;
    total += std::exp(-s * t0) * h * (p0 * phi1(w) + (p1 - p0) * phi2(w));
  }
  return total;
}

double tabulated_energy(const TabulatedPdp& t) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < t.delays.size(); ++k) {
    total += 0.5 * (t.delays[k + 1] - t.delays[k]) * (t.densities[k] + t.densities[k + 1]);
  }
  return total;
}

double interpolate(const TabulatedPdp& t, double tau) {
  if (t.delays.empty() || tau < t.delays.front() || tau > t.delays.back()) return 0.0;
  const auto it = std::upper_bound(t.delays.begin(), t.delays.end(), tau);
  if (it == t.delays.end()) return t.densities.back();
  const std::size_t k = static_cast<std::size_t>(it - t.delays.begin());
  const double t0 = t.delays[k - 1], t1 = t.delays[k];
  const double f = (tau - t0) / (t1 - t0);
  return t.densities[k - 1] + f * (t.densities[k] - t.densities[k - 1]);
}

TabulatedPdp cut_table(const TabulatedPdp& t, double tau_t) {
  TabulatedPdp out;
  for (std::size_t k = 0; k < t.delays.size() && t.delays[k] < tau_t; ++k) {
    out.delays.push_back(t.delays[k]);
    out.densities.push_back(t.densities[k]);
  }
  if (!out.delays.empty() && tau_t < t.delays.back()) {
    out.delays.push_back(tau_t);
    out.densities.push_back(interpolate(t, tau_t));
  }
  return out;
}

}  // namespace

PowerDelayProfile PowerDelayProfile::exponential(double tau_c, double amplitude) {
  if (!(tau_c > 0.0) || !std::isfinite(tau_c)) {
    throw ChannelModelError("exponential profile requires tau_c > 0");
  }
  if (amplitude < 0.0) amplitude = 1.0 / tau_c;
  return PowerDelayProfile(ExponentialPdp{tau_c, amplitude}, std::nullopt);
}

PowerDelayProfile PowerDelayProfile::tabulated(std::vector<double> delays,
                                               std::vector<double> densities) {
  if (delays.size() != densities.size()) {
    throw ChannelModelError("tabulated profile: delays and densities differ in length");
  }
  if (delays.size() < 2) throw ChannelModelError("tabulated profile needs at least two rows");
  if (delays.front() < 0.0) throw ChannelModelError("tabulated profile: delays must start at >= 0");
  for (std::size_t k = 0; k < delays.size(); ++k) {
    if (!std::isfinite(delays[k]) || !std::isfinite(densities[k])) {
      throw ChannelModelError("tabulated profile: non-finite entry");
    }
    if (densities[k] < 0.0) throw ChannelModelError("tabulated profile: negative density");
    if (k > 0 && !(delays[k] > delays[k - 1])) {
      throw ChannelModelError("tabulated profile: delays must be strictly increasing");
    }
  }
  return PowerDelayProfile(TabulatedPdp{std::move(delays), std::move(densities)}, std::nullopt);
}

double PowerDelayProfile::density(double tau) const {
  if (tau < 0.0) return 0.0;
  if (truncation_ && tau >= *truncation_) return 0.0;
  if (const auto* e = std::get_if<ExponentialPdp>(&kind_)) {
    return e->amplitude * std::exp(-tau / e->tau_c);
  }
  return interpolate(std::get<TabulatedPdp>(kind_), tau);
}

double PowerDelayProfile::energy_below(double tau_t) const {
  if (const auto* e = std::get_if<ExponentialPdp>(&kind_)) {
    if (std::isinf(tau_t)) return e->amplitude * e->tau_c;
    return e->amplitude * e->tau_c * -std::expm1(-tau_t / e->tau_c);
  }
  const auto& t = std::get<TabulatedPdp>(kind_);
  if (tau_t >= t.delays.back()) return tabulated_energy(t);
  return tabulated_energy(cut_table(t, tau_t));
}

double PowerDelayProfile::energy() const { return energy_below(support_end()); }

double PowerDelayProfile::support_end() const {
  if (truncation_) return *truncation_;
  if (is_exponential()) return kInf;
  return std::get<TabulatedPdp>(kind_).delays.back();
}

PowerDelayProfile PowerDelayProfile::truncated_at(double tau_t) const {
  const double cut = truncation_ ? std::min(*truncation_, tau_t) : tau_t;
  if (std::isinf(cut)) return *this;
  if (const auto* t = std::get_if<TabulatedPdp>(&kind_)) {
    return PowerDelayProfile(cut_table(*t, cut), cut);
  }
  return PowerDelayProfile(kind_, cut);
}

TruncationResult truncate(const PowerDelayProfile& pdp, double tau_t) {
  if (!(tau_t > 0.0)) throw ChannelModelError("truncate: tau_t must be > 0");
  const double before = pdp.energy();
  PowerDelayProfile out = pdp.truncated_at(tau_t);
  const double after = out.energy();
  const double retained = before > 0.0 ? after / before : 1.0;
  return {std::move(out), retained};
}

double response_variance(const PowerDelayProfile& pdp) { return pdp.energy(); }

std::string to_string(SpacingConvention c) {
  return c == SpacingConvention::cyclic ? "cyclic" : "paper-table";
}

SpacingConvention parse_convention(const std::string& s) {
  if (s == "cyclic") return SpacingConvention::cyclic;
  if (s == "paper-table" || s == "paper_table") return SpacingConvention::paper_table;
  throw ChannelModelError("unknown spacing convention '" + s + "' (expected cyclic|paper-table)");
}

double spacing_theta(double df, SpacingConvention conv) {
  return conv == SpacingConvention::cyclic ? 2.0 * std::numbers::pi * df : df;
}

Complex correlation_a(const PowerDelayProfile& pdp, double df, SpacingConvention conv) {
  if (!(df >= 0.0)) throw ChannelModelError("correlation_a: spacing must be >= 0");
  const double energy = pdp.energy();
  if (!(energy > 0.0)) throw ChannelModelError("correlation_a: zero-energy profile");
  if (df == 0.0) return {1.0, 0.0};
  const double theta = spacing_theta(df, conv);
  if (const auto* e = std::get_if<ExponentialPdp>(&pdp.kind())) {
    const double x = theta * e->tau_c;
    const Complex head = 1.0 / Complex{1.0, x};
    const auto tau_t = pdp.truncation();
    if (!tau_t) return head;
    const double u = *tau_t / e->tau_c;
    const Complex w{u, theta * *tau_t};  // tau_t * (1/tau_c + j theta)
    // (1 - e^{-w}) / (1 - e^{-u}) = (w phi1(w)) / (u phi1(u))
    return head * (w * phi1(w)) / (u * phi1(Complex{u, 0.0}).real());
  }
  const auto& t = std::get<TabulatedPdp>(pdp.kind());
  return tabulated_transform(t, theta) / tabulated_transform(t, 0.0).real();
}

double decorrelation(const PowerDelayProfile& pdp, double df, SpacingConvention conv) {
  if (const auto* e = std::get_if<ExponentialPdp>(&pdp.kind())) {
    if (!(df >= 0.0)) throw ChannelModelError("decorrelation: spacing must be >= 0");
    const double theta = spacing_theta(df, conv);
    const double x = theta * e->tau_c;
    const auto tau_t = pdp.truncation();
    if (!tau_t) return x * x / (1.0 + x * x);
    const double u = *tau_t / e->tau_c;
    const double s = std::sin(0.5 * theta * *tau_t);
    const double denom = -std::expm1(-u);
    const double correction = 4.0 * std::exp(-u) * s * s / (denom * denom);
    return (x * x - correction) / (1.0 + x * x);
  }
  return 1.0 - std::norm(correlation_a(pdp, df, conv));
}

FrequencyCorrelation FrequencyCorrelation::from(Complex a, double sigma_z_sq) {
  if (!(std::abs(a) <= 1.0 + 1e-15)) throw ChannelModelError("|a| must not exceed 1");
  if (!(sigma_z_sq >= 0.0)) throw ChannelModelError("sigma_z^2 must be >= 0");
  return {a, sigma_z_sq, std::max(0.0, 1.0 - std::norm(a))};
}

FrequencyCorrelation FrequencyCorrelation::from_profile(const PowerDelayProfile& pdp, double df,
                                                        SpacingConvention conv) {
  FrequencyCorrelation fc;
  fc.a = correlation_a(pdp, df, conv);
  fc.sigma_z_sq = response_variance(pdp);
  fc.one_minus_a_sq = std::max(0.0, decorrelation(pdp, df, conv));
  return fc;
}

Gaussian2 conditional_response(const FrequencyCorrelation& fc, Complex z_prev) {
  const Vec2 mean = to_matrix(fc.a) * to_vec(z_prev);
  return Gaussian2::isotropic(mean, fc.sigma_z_sq * fc.one_minus_a_sq);
}

Mat4 joint_pair_covariance(const FrequencyCorrelation& fc) {
  const double s = fc.sigma_z_sq;
  const double re = fc.a.real() * s;
  const double im = fc.a.imag() * s;
  return Mat4{{{s, 0.0, re, -im}, {0.0, s, im, re}, {re, im, s, 0.0}, {-im, re, 0.0, s}}};
}

PowerDelayProfile read_tabulated_pdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ChannelModelError("cannot open PDP table '" + path.string() + "'");
  std::string line;
  std::vector<double> delays, densities;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double d, p;
    const bool numeric = static_cast<bool>(fields >> d >> p);
    if (!header_seen) {
      if (numeric) {
        throw ChannelModelError(path.string() + ": header row required (delay_seconds,density_per_second)");
      }
      header_seen = true;
      continue;
    }
    if (!numeric) {
      throw ChannelModelError(path.string() + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    delays.push_back(d);
    densities.push_back(p);
  }
  return PowerDelayProfile::tabulated(std::move(delays), std::move(densities));
}

}  // namespace ub
