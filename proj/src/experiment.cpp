#include "ub/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <omp.h>

#include "ub/gaussian.hpp"
#include "ub/oracle_sim.hpp"

namespace ub {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + s + "'");
  }
}

long long parse_int(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    // Accept integral values written in floating notation, e.g. 1e4.
    const double d = parse_double(key, s);
    if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError(key, "expected an integer, got '" + s + "'");
    return static_cast<long long>(d);
  }
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Shortest decimal form that parses back to the same double.
std::string shortest(double v) {
  char buf[40];
  for (int digits = 1; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + shortest(v[i]);
  return s;
}

std::string timestamp_line() {
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# generated_at=") + buf + "\n";
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string estimator_name(Estimator e) {
  return e == Estimator::conditional ? "conditional" : "sampled";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- config

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k{
      "pdp_kind", "tau_c", "pdp_table", "tau_t", "bandwidth", "block_length", "cyclic_prefix",
      "snr", "coherence_fraction", "convention", "trials", "seed", "workers", "estimator",
      "sweep_n", "sweep_points", "n_truncated", "parallel_points", "oracle_traces",
      "oracle_trace_length", "oracle_a_sq", "oracle_snr", "oracle_mi_states",
      "oracle_matrix_trials", "corrupt_recursion", "out"};
  return k;
}

void ConfigLayers::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", path.string() + ":" + std::to_string(line_no) +
                                      ": expected 'key = value'");
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void ConfigLayers::load_env() {
  for (const auto& key : ExperimentConfig::keys()) {
    std::string name = "UB_";
    for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(name.c_str())) set(key, v);
  }
}

void ConfigLayers::set(const std::string& key, const std::string& value) {
  std::string k = key;
  std::replace(k.begin(), k.end(), '-', '_');
  values_[k] = value;
}

ExperimentConfig ExperimentConfig::from(const ConfigLayers& layers) {
  ExperimentConfig c;
  c.workers = std::max(1, omp_get_max_threads());
  const auto& known = keys();
  for (const auto& [key, value] : layers.values()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(key, "unknown configuration key");
    }
    if (key == "pdp_kind") {
      if (value != "exponential" && value != "tabulated") {
        throw ConfigError(key, "expected exponential|tabulated");
      }
      c.pdp_kind = value;
    } else if (key == "tau_c") {
      c.tau_c = parse_double(key, value);
    } else if (key == "pdp_table") {
      c.pdp_table = value;
    } else if (key == "tau_t") {
      if (value == "none" || value == "inf") c.tau_t = kInf;
      else c.tau_t = parse_double(key, value);
    } else if (key == "bandwidth") {
      c.bandwidth = parse_double(key, value);
    } else if (key == "block_length") {
      c.block_length = parse_double(key, value);
    } else if (key == "cyclic_prefix") {
      c.cyclic_prefix = parse_double(key, value);
    } else if (key == "snr") {
      c.snr = parse_double(key, value);
    } else if (key == "coherence_fraction") {
      c.coherence_fraction = parse_double(key, value);
    } else if (key == "convention") {
      try {
        c.convention = parse_convention(value);
      } catch (const std::exception& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "trials") {
      c.trials = parse_int(key, value);
    } else if (key == "seed") {
      try {
        c.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw ConfigError(key, "expected an unsigned 64-bit integer");
      }
    } else if (key == "workers") {
      c.workers = static_cast<int>(parse_int(key, value));
    } else if (key == "estimator") {
      if (value == "conditional") c.estimator = Estimator::conditional;
      else if (value == "sampled") c.estimator = Estimator::sampled;
      else throw ConfigError(key, "expected conditional|sampled");
    } else if (key == "sweep_n") {
      c.sweep_n.clear();
      for (const auto& item : split_list(value)) c.sweep_n.push_back(parse_int(key, item));
    } else if (key == "sweep_points") {
      c.sweep_points = static_cast<int>(parse_int(key, value));
    } else if (key == "n_truncated") {
      c.n_truncated = parse_int(key, value);
    } else if (key == "parallel_points") {
      c.parallel_points = parse_bool(key, value);
    } else if (key == "oracle_traces") {
      c.oracle_traces = static_cast<int>(parse_int(key, value));
    } else if (key == "oracle_trace_length") {
      c.oracle_trace_length = parse_int(key, value);
    } else if (key == "oracle_a_sq") {
      c.oracle_a_sq.clear();
      for (const auto& item : split_list(value)) c.oracle_a_sq.push_back(parse_double(key, item));
    } else if (key == "oracle_snr") {
      c.oracle_snr.clear();
      for (const auto& item : split_list(value)) c.oracle_snr.push_back(parse_double(key, item));
    } else if (key == "oracle_mi_states") {
      c.oracle_mi_states = static_cast<int>(parse_int(key, value));
    } else if (key == "oracle_matrix_trials") {
      c.oracle_matrix_trials = static_cast<int>(parse_int(key, value));
    } else if (key == "corrupt_recursion") {
      c.corrupt_recursion = parse_double(key, value);
    } else if (key == "out") {
      c.out = value;
    }
  }

  if (c.pdp_kind == "tabulated" && c.pdp_table.empty()) {
    throw ConfigError("pdp_table", "required when pdp_kind = tabulated");
  }
  if (c.pdp_kind == "exponential" && !(c.tau_c > 0.0)) throw ConfigError("tau_c", "must be > 0");
  if (c.tau_t && !(*c.tau_t > 0.0)) throw ConfigError("tau_t", "must be > 0");
  if (!(c.snr >= 0.0)) throw ConfigError("snr", "must be >= 0");
  if (!(c.coherence_fraction > 0.0 && c.coherence_fraction <= 1.0)) {
    throw ConfigError("coherence_fraction", "must lie in (0, 1]");
  }
  if (c.trials < 1) throw ConfigError("trials", "must be >= 1");
  if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
  if (c.sweep_points < 1) throw ConfigError("sweep_points", "must be >= 1");
  if (c.n_truncated < 1) throw ConfigError("n_truncated", "must be >= 1");
  for (long long n : c.sweep_n) {
    if (n < 1) throw ConfigError("sweep_n", "entries must be >= 1");
  }
  for (double a : c.oracle_a_sq) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("oracle_a_sq", "entries must lie in [0, 1]");
  }
  for (double s : c.oracle_snr) {
    if (!(s > 0.0)) throw ConfigError("oracle_snr", "entries must be > 0");
  }
  if (c.oracle_a_sq.empty() || c.oracle_snr.empty()) {
    throw ConfigError("oracle_a_sq", "oracle grids must not be empty");
  }
  if (c.oracle_traces < 1 || c.oracle_trace_length < 1) {
    throw ConfigError("oracle_traces", "trace count and length must be >= 1");
  }
  return c;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream s;
  s << "pdp_kind = " << pdp_kind << "\n";
  s << "tau_c = " << shortest(tau_c) << "\n";
  if (!pdp_table.empty()) s << "pdp_table = " << pdp_table << "\n";
  if (tau_t) s << "tau_t = " << (std::isinf(*tau_t) ? std::string("none") : shortest(*tau_t)) << "\n";
  s << "bandwidth = " << shortest(bandwidth) << "\n";
  s << "block_length = " << shortest(block_length) << "\n";
  s << "cyclic_prefix = " << shortest(cyclic_prefix) << "\n";
  s << "snr = " << shortest(snr) << "\n";
  s << "coherence_fraction = " << shortest(coherence_fraction) << "\n";
  s << "convention = " << to_string(convention) << "\n";
  s << "trials = " << trials << "\n";
  s << "seed = " << seed << "\n";
  s << "estimator = " << estimator_name(estimator) << "\n";
  if (!sweep_n.empty()) {
    s << "sweep_n = ";
    for (std::size_t i = 0; i < sweep_n.size(); ++i) s << (i ? "," : "") << sweep_n[i];
    s << "\n";
  }
  s << "sweep_points = " << sweep_points << "\n";
  s << "n_truncated = " << n_truncated << "\n";
  s << "oracle_traces = " << oracle_traces << "\n";
  s << "oracle_trace_length = " << oracle_trace_length << "\n";
  s << "oracle_a_sq = " << join_doubles(oracle_a_sq) << "\n";
  s << "oracle_snr = " << join_doubles(oracle_snr) << "\n";
  s << "oracle_mi_states = " << oracle_mi_states << "\n";
  s << "oracle_matrix_trials = " << oracle_matrix_trials << "\n";
  if (corrupt_recursion != 1.0) s << "corrupt_recursion = " << shortest(corrupt_recursion) << "\n";
  return s.str();
}

// ---------------------------------------------------------------- derive

NormalizedParams DerivedParameters::normalized(long long n, long long n_truncated) const {
  return {budget.snr_adjusted(), 1.0 - correlation.one_minus_a_sq, n,
          std::clamp<long long>(n_truncated, 1, n)};
}

DerivedParameters derive(const ExperimentConfig& cfg) {
  DerivedParameters d{{}, PowerDelayProfile::exponential(1.0), 0.0, 0.0, {}, {}, 1.0, 0.0, {}};
  try {
    d.grid = derive_grid(cfg.bandwidth, cfg.block_length, cfg.cyclic_prefix);
  } catch (const GridError& e) {
    throw ConfigError(e.field(), e.what());
  }

  PowerDelayProfile base = PowerDelayProfile::exponential(1.0);
  try {
    base = cfg.pdp_kind == "tabulated" ? read_tabulated_pdp(cfg.pdp_table)
                                       : PowerDelayProfile::exponential(cfg.tau_c);
  } catch (const ChannelModelError& e) {
    throw ConfigError(cfg.pdp_kind == "tabulated" ? "pdp_table" : "tau_c", e.what());
  }

  if (cfg.cyclic_prefix > 0.0) {
    d.e_trunc = cfg.pdp_kind == "tabulated" ? truncation_energy(base, cfg.cyclic_prefix)
                                            : truncation_energy(cfg.tau_c, cfg.cyclic_prefix);
  } else {
    d.e_trunc = 1.0;
    d.warnings.push_back(
        "cyclic_prefix = 0: no prefix, E_trunc = exp(0) = 1 reported; the profile is left "
        "untruncated and the SNR is not adjusted for truncation");
  }
  d.tau_t = cfg.tau_t ? *cfg.tau_t : (cfg.cyclic_prefix > 0.0 ? cfg.cyclic_prefix : kInf);
  d.profile = std::isinf(d.tau_t) ? base : truncate(base, d.tau_t).profile;

  const double e_for_snr = cfg.cyclic_prefix > 0.0 ? d.e_trunc : 0.0;
  if (!(e_for_snr < 1.0)) {
    throw ConfigError("cyclic_prefix", "the prefix retains no channel energy (E_trunc = 1)");
  }
  d.budget = {cfg.snr, cfg.coherence_fraction, e_for_snr};
  try {
    d.correlation = FrequencyCorrelation::from_profile(d.profile, d.grid.spacing_hz, cfg.convention);
  } catch (const ChannelModelError& e) {
    throw ConfigError("tau_t", e.what());
  }
  d.cp_factor = cp_penalty(1.0, d.grid.block_length_s, d.grid.cyclic_prefix_s);
  d.c_csi = perfect_csi_capacity(d.budget.snr_adjusted());
  return d;
}

ParameterReport derive_parameters(const ExperimentConfig& cfg) {
  const DerivedParameters d = derive(cfg);
  ParameterReport r;
  r.warnings = d.warnings;
  auto add = [&](std::string group, std::string name, double v, std::string unit, std::string f) {
    r.rows.push_back({std::move(group), std::move(name), v, std::move(unit), std::move(f)});
  };
  const bool exponential = cfg.pdp_kind == "exponential";
  if (exponential) add("fundamental", "tau_c", cfg.tau_c, "s", "input");
  add("fundamental", "bandwidth", cfg.bandwidth, "Hz", "input");
  add("fundamental", "snr", cfg.snr, "1", "input");
  add("fundamental", "coherence_fraction", cfg.coherence_fraction, "1", "input");
  add("block_fading", "block_length", cfg.block_length, "s", "input");
  add("block_fading", "cyclic_prefix", cfg.cyclic_prefix, "s", "input");
  add("block_fading", "tau_t", d.tau_t, "s", cfg.tau_t ? "input" : "cyclic_prefix (inf if zero)");
  add("block_fading", "N", static_cast<double>(d.grid.subcarriers), "1", "bandwidth*block_length");
  add("block_fading", "delta_f", d.grid.spacing_hz, "Hz", "1/block_length");
  add("block_fading", "theta", spacing_theta(d.grid.spacing_hz, cfg.convention), "rad/s",
      cfg.convention == SpacingConvention::cyclic ? "2*pi*delta_f" : "delta_f");
  add("block_fading", "E_trunc", d.e_trunc, "1",
      exponential ? "exp(-cyclic_prefix/tau_c)" : "1 - retained fraction at cyclic_prefix");
  add("block_fading", "snr_adjusted", d.budget.snr_adjusted(), "1",
      "snr*eta*(1-E)/(1+snr*(1-eta*(1-E))), eta=coherence_fraction, E=E_trunc (0 if no prefix)");
  add("block_fading", "cp_factor", d.cp_factor, "1", "block_length/(block_length+cyclic_prefix)");
  add("lower_bound", "a_re", d.correlation.a.real(), "1", "Re int P'(t) e^{-j theta t} dt / int P'(t) dt");
  add("lower_bound", "a_im", d.correlation.a.imag(), "1", "Im int P'(t) e^{-j theta t} dt / int P'(t) dt");
  add("lower_bound", "one_minus_a_sq", d.correlation.one_minus_a_sq, "1", "1-|a|^2");
  add("lower_bound", "a_sq", 1.0 - d.correlation.one_minus_a_sq, "1", "|a|^2");
  add("lower_bound", "sigma_z_sq_profile", d.correlation.sigma_z_sq, "1", "int_0^tau_t P(t) dt");
  add("lower_bound", "normalized_snr", d.budget.snr_adjusted(), "1",
      "snr_adjusted = sigma_z^2 sigma_x^2 / sigma_n^2");
  add("lower_bound", "sigma_z_sq", 0.5, "1", "chosen split");
  add("lower_bound", "sigma_n_sq", 1.0, "1", "chosen split");
  add("lower_bound", "sigma_x_sq", d.budget.snr_adjusted() * 1.0 / 0.5, "1",
      "normalized_snr*sigma_n_sq/sigma_z_sq");
  add("lower_bound", "C_csi", d.c_csi, "bit/s/Hz", "exp(1/(2 snr_adjusted)) E1(1/(2 snr_adjusted))/ln 2");
  add("lower_bound", "C_csi_rate", d.c_csi * cfg.bandwidth, "bit/s", "C_csi*bandwidth");
  return r;
}

// ---------------------------------------------------------------- sweep

std::vector<long long> sweep_points(const ExperimentConfig& cfg, long long n_max) {
  std::set<long long> points;
  if (!cfg.sweep_n.empty()) {
    points.insert(cfg.sweep_n.begin(), cfg.sweep_n.end());
  } else if (n_max <= 10 || cfg.sweep_points == 1) {
    points.insert(n_max);
  } else {
    const double lo = std::log(10.0), hi = std::log(static_cast<double>(n_max));
    for (int k = 0; k < cfg.sweep_points; ++k) {
      const double t = static_cast<double>(k) / (cfg.sweep_points - 1);
      points.insert(std::llround(std::exp(lo + t * (hi - lo))));
    }
    points.insert(n_max);
  }
  return {points.begin(), points.end()};
}

SweepResult run_bound_sweep(const ExperimentConfig& cfg) {
  const DerivedParameters d = derive(cfg);
  const auto points = sweep_points(cfg, d.grid.subcarriers);
  SweepResult out;
  out.rows.resize(points.size());
  auto run_point = [&](std::size_t k, int workers) {
    const long long n = points[k];
    const NormalizedParams p = d.normalized(n, cfg.n_truncated);
    const auto start = std::chrono::steady_clock::now();
    BoundResult r = estimate_bounds(p, McConfig{cfg.trials, cfg.seed, workers, cfg.estimator}, d.prefix());
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    out.rows[k] = {n, p.n_truncated, static_cast<double>(n) / cfg.block_length, std::move(r),
                   elapsed.count()};
  };
  if (cfg.parallel_points) {
#pragma omp parallel for num_threads(cfg.workers) schedule(dynamic, 1)
    for (std::size_t k = 0; k < points.size(); ++k) run_point(k, 1);
  } else {
    for (std::size_t k = 0; k < points.size(); ++k) run_point(k, cfg.workers);
  }
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    const auto& a = out.rows[k - 1].bounds.fraction_of_csi;
    const auto& b = out.rows[k].bounds.fraction_of_csi;
    if (b.value < a.value - 3.0 * std::hypot(a.se, b.se)) out.fraction_monotone = false;
  }
  return out;
}

// ---------------------------------------------------------------- oracle

namespace {

constexpr std::uint64_t kTrackerStreams = 1ULL << 40;
constexpr std::uint64_t kMiStreams = 2ULL << 40;
constexpr std::uint64_t kMatrixStreams = 3ULL << 40;

void tracker_suite(const ExperimentConfig& cfg, const DerivedParameters& d,
                   std::vector<OracleCheck>& checks) {
  const double sigma_z_sq = d.correlation.sigma_z_sq;
  const double sigma_n_sq = 1.0;
  const std::size_t combos = cfg.oracle_a_sq.size() * cfg.oracle_snr.size();
  double worst_rel = 0.0, worst_aniso = 0.0, worst_prior_dev = 0.0;
  bool ran_zero = false;
  for (int t = 0; t < cfg.oracle_traces; ++t) {
    const std::size_t combo = static_cast<std::size_t>(t) % combos;
    const double a_sq = cfg.oracle_a_sq[combo / cfg.oracle_snr.size()];
    const double snr = cfg.oracle_snr[combo % cfg.oracle_snr.size()];
    RandomStream rng(cfg.seed, kTrackerStreams + static_cast<std::uint64_t>(t));
    const Complex a = std::polar(std::sqrt(a_sq), 2.0 * std::numbers::pi * rng.uniform());
    const FrequencyCorrelation fc = FrequencyCorrelation::from(a, sigma_z_sq);
    const double sigma_x_sq = snr * sigma_n_sq / sigma_z_sq;
    const double snr_eff = sigma_z_sq * sigma_x_sq / sigma_n_sq;
    const ChannelTrace trace = simulate(fc, sigma_x_sq, sigma_n_sq, cfg.oracle_trace_length, rng);
    const auto post = track(trace, fc, sigma_n_sq);
    double chain = 1.0;
    for (std::size_t i = 0; i < post.size(); ++i) {
      if (i > 0) {
        chain = recursion_step(chain, std::norm(trace.x[i - 1]) / sigma_x_sq, fc.a_sq(), snr_eff) *
                cfg.corrupt_recursion;
      }
      const Mat2& c = post[i].cov;
      worst_rel = std::max(worst_rel, std::abs(c.m00 / sigma_z_sq - chain) / chain);
      worst_rel = std::max(worst_rel, std::abs(c.m11 / sigma_z_sq - chain) / chain);
      worst_aniso = std::max({worst_aniso, std::abs(c.m01), std::abs(c.m10)});
      if (a_sq == 0.0) {
        ran_zero = true;
        worst_prior_dev = std::max({worst_prior_dev, std::abs(c.m00 - sigma_z_sq),
                                    std::abs(c.m11 - sigma_z_sq), std::abs(post[i].mean[0]),
                                    std::abs(post[i].mean[1])});
      }
    }
  }
  checks.push_back({"tracker_equivalence", worst_rel, 1e-12, worst_rel <= 1e-12,
                    "max relative deviation of tracker variance from the recursion chain"});
  checks.push_back({"tracker_isotropy", worst_aniso, 1e-14 * sigma_z_sq,
                    worst_aniso <= 1e-14 * sigma_z_sq, "max |off-diagonal| of posterior covariance"});
  if (ran_zero) {
    checks.push_back({"tracker_prior_at_zero_correlation", worst_prior_dev, 1e-15 * sigma_z_sq,
                      worst_prior_dev <= 1e-15 * sigma_z_sq,
                      "max deviation of the |a|^2 = 0 posterior from the prior"});
  }
}

void mi_suite(const ExperimentConfig& cfg, const DerivedParameters& d,
              std::vector<OracleCheck>& checks) {
  constexpr long long kBoundSamples = 100000;
  constexpr long long kMaxIndex = 200;
  const double sigma_z_sq = d.correlation.sigma_z_sq;
  const double sigma_n_sq = 1.0;
  const std::array<double, 2> snrs{d.budget.snr_adjusted(), 1.0};
  double worst_margin = kInf, worst_err = 0.0;
  int failures = 0;
  std::string failure_note;
  for (int k = 0; k < cfg.oracle_mi_states; ++k) {
    RandomStream rng(cfg.seed, kMiStreams + static_cast<std::uint64_t>(k));
    const double snr = snrs[static_cast<std::size_t>(k) % snrs.size()];
    const double sigma_x_sq = snr * sigma_n_sq / sigma_z_sq;
    const long long index = static_cast<long long>(rng.uniform() * kMaxIndex);
    ChannelTrace trace = simulate(d.correlation, sigma_x_sq, sigma_n_sq, index + 1, rng);
    const Gaussian2 state = track(trace, d.correlation, sigma_n_sq).back();
    const double sigma_hat_sq = state.cov.m00;
    const Complex mu_hat = to_complex(state.mean);

    MiResult mi;
    try {
      mi = exact_conditional_mi(sigma_hat_sq, mu_hat, sigma_x_sq, sigma_n_sq);
    } catch (const QuadraturePrecisionError& e) {
      ++failures;
      failure_note = e.what();
      worst_err = kInf;
      continue;
    }
    worst_err = std::max(worst_err, mi.error_estimate);

    const double snr_eff = sigma_z_sq * sigma_x_sq / sigma_n_sq;
    const double mu_norm_sq = std::norm(mu_hat) / sigma_z_sq;
    const double sigma_norm_sq = sigma_hat_sq / sigma_z_sq;
    double sum = 0.0, sumsq = 0.0;
    for (long long s = 0; s < kBoundSamples; ++s) {
      const double v = information_sample(snr_eff, mu_norm_sq, rng.exponential(2.0), sigma_norm_sq);
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / kBoundSamples;
    const double se = std::sqrt(std::max(0.0, sumsq / kBoundSamples - mean * mean) / (kBoundSamples - 1));
    const double margin = mi.bits - (mean - 3.0 * se);
    worst_margin = std::min(worst_margin, margin);
    if (margin < 0.0) ++failures;
  }
  checks.push_back({"mi_dominance", worst_margin, 0.0, failures == 0,
                    failure_note.empty() ? "min over states of MI - (bound mean - 3 SE), bits"
                                         : failure_note});
  checks.push_back({"mi_quadrature_self_consistency", worst_err, 1e-4, worst_err < 1e-4,
                    "max |MI(grid) - MI(2x grid)|, bits"});
}

void matrix_suite(const ExperimentConfig& cfg, std::vector<OracleCheck>& checks) {
  RandomStream rng(cfg.seed, kMatrixStreams);
  int v5 = 0, v6 = 0, v7 = 0;
  for (int t = 0; t < cfg.oracle_matrix_trials; ++t) {
    if (!inverse_complement_is_pds(random_contraction_pds(rng))) ++v5;
    if (!resolvent_complement_is_pds(random_pds(rng))) ++v6;
    if (!complement_det_below_one(random_contraction_pds(rng))) ++v7;
  }
  checks.push_back({"matrix_inverse_complement_pds", static_cast<double>(v5), 0.0, v5 == 0,
                    "violations of (I-D)^-1 - I PDS"});
  checks.push_back({"matrix_resolvent_complement_pds", static_cast<double>(v6), 0.0, v6 == 0,
                    "violations of I - (I+D)^-1 PDS"});
  checks.push_back({"matrix_complement_det_below_one", static_cast<double>(v7), 0.0, v7 == 0,
                    "violations of det(I-D) < 1"});
}

void scale_suite(const ExperimentConfig& cfg, const DerivedParameters& d,
                 std::vector<OracleCheck>& checks) {
  const double s = d.budget.snr_adjusted();
  const long long n = std::min<long long>(d.grid.subcarriers, 2000);
  const double a_sq = 1.0 - d.correlation.one_minus_a_sq;
  // Power-of-two rescalings keep sigma_z^2 sigma_x^2 / sigma_n^2 exactly equal.
  const std::array<std::array<double, 3>, 4> triples{
      {{1.0, s, 1.0}, {0.5, 2.0 * s, 1.0}, {2.0, s, 2.0}, {4.0, 0.5 * s, 2.0}}};
  const McConfig mc{std::min<long long>(cfg.trials, 200), cfg.seed, cfg.workers, cfg.estimator};
  const PhysicalParams base{triples[0][0], triples[0][1], triples[0][2], a_sq, n,
                            std::min(cfg.n_truncated, n)};
  const BoundResult ref = estimate_bounds(base, mc);
  int mismatches = 0;
  for (std::size_t k = 1; k < triples.size(); ++k) {
    PhysicalParams p = base;
    p.sigma_z_sq = triples[k][0];
    p.sigma_x_sq = triples[k][1];
    p.sigma_n_sq = triples[k][2];
    if (!(estimate_bounds(p, mc) == ref)) ++mismatches;
  }
  checks.push_back({"scale_invariance", static_cast<double>(mismatches), 0.0, mismatches == 0,
                    "variance triples with equal sigma_z^2 sigma_x^2/sigma_n^2 giving non-identical results"});
}

}  // namespace

std::vector<OracleCheck> run_oracle_suite(const ExperimentConfig& cfg) {
  const DerivedParameters d = derive(cfg);
  std::vector<OracleCheck> checks;
  tracker_suite(cfg, d, checks);
  mi_suite(cfg, d, checks);
  matrix_suite(cfg, checks);
  scale_suite(cfg, d, checks);
  return checks;
}

// ---------------------------------------------------------------- writers

void write_parameter_report(const ParameterReport& report, const ExperimentConfig& cfg,
                            const std::filesystem::path& dir) {
  {
    auto out = open_output(dir / "parameters.csv");
    out << timestamp_line();
    out << "# spacing_convention=" << to_string(cfg.convention) << "\n";
    out << "schema_version,group,name,value,unit,formula\n";
    for (const auto& r : report.rows) {
      out << kSchemaVersion << "," << r.group << "," << r.name << "," << format_double(r.value)
          << "," << r.unit << "," << quote(r.formula) << "\n";
    }
  }
  auto out = open_output(dir / "parameters.txt");
  out << "Parameter report (spacing convention: " << to_string(cfg.convention) << ")\n";
  std::string group;
  for (const auto& r : report.rows) {
    if (r.group != group) {
      group = r.group;
      out << "\n[" << group << "]\n";
    }
    char buf[256];
    std::snprintf(buf, sizeof buf, "  %-20s %-24.6g %-10s ", r.name.c_str(), r.value, r.unit.c_str());
    out << buf << r.formula << "\n";
  }
  for (const auto& w : report.warnings) out << "\nwarning: " << w << "\n";
}

void write_sweep(const SweepResult& sweep, const ExperimentConfig& cfg,
                 const std::filesystem::path& dir) {
  {
    auto out = open_output(dir / "sweep.csv");
    out << timestamp_line();
    out << "# spacing_convention=" << to_string(cfg.convention) << "\n";
    out << "schema_version,n,n_truncated,bandwidth_hz,L1,L1_se,L2,L2_se,L1A,L1A_se,L2A,L2A_se,"
           "L2B,L2B_se,C_csi,fraction_of_csi,fraction_of_csi_se,trials,seed,estimator\n";
    for (const auto& r : sweep.rows) {
      const auto& b = r.bounds;
      out << kSchemaVersion << "," << r.n << "," << r.n_truncated << ","
          << format_double(r.bandwidth_hz);
      for (const Estimate* e : {&b.l1, &b.l2, &b.l1a, &b.l2a, &b.l2b}) {
        out << "," << format_double(e->value) << "," << format_double(e->se);
      }
      out << "," << format_double(b.c_csi) << "," << format_double(b.fraction_of_csi.value) << ","
          << format_double(b.fraction_of_csi.se) << "," << b.trials << "," << cfg.seed << ","
          << estimator_name(cfg.estimator) << "\n";
    }
  }
  if (!sweep.rows.empty()) {
    const auto& largest = sweep.rows.back();
    auto out = open_output(dir / "per_index.csv");
    out << timestamp_line();
    out << "# spacing_convention=" << to_string(cfg.convention) << "\n";
    out << "schema_version,n,i,I,I_se,I_clamped,I_clamped_se\n";
    for (std::size_t i = 0; i < largest.bounds.info.size(); ++i) {
      out << kSchemaVersion << "," << largest.n << "," << i << ","
          << format_double(largest.bounds.info[i].value) << ","
          << format_double(largest.bounds.info[i].se) << ","
          << format_double(largest.bounds.info_clamped[i].value) << ","
          << format_double(largest.bounds.info_clamped[i].se) << "\n";
    }
  }
  {
    auto out = open_output(dir / "timing.csv");
    out << timestamp_line();
    out << "schema_version,n,wall_time_s\n";
    for (const auto& r : sweep.rows) {
      out << kSchemaVersion << "," << r.n << "," << format_double(r.wall_time_s) << "\n";
    }
  }
  auto out = open_output(dir / "plot_sweep.py");
  out << R"py(# Plots sweep.csv: (a) full range, (b) low-bandwidth detail.
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "sweep.csv"
with open(path) as f:
    rows = list(csv.DictReader(line for line in f if not line.startswith("#")))
bw = [float(r["bandwidth_hz"]) / 1e6 for r in rows]
l2b = [float(r["L2B"]) for r in rows]
csi = [float(r["C_csi"]) for r in rows]

fig, (full, detail) = plt.subplots(2, 1, figsize=(6, 7))
for ax in (full, detail):
    ax.plot(bw, l2b, "o-", label="lower bound L2B")
    ax.plot(bw, csi, "--", label="perfect receiver CSI")
    ax.set_xlabel("bandwidth (MHz)")
    ax.set_ylabel("bit/s/Hz")
    ax.grid(True)
full.set_title("(a) full")
full.legend()
detail.set_title("(b) detailed")
detail.set_xlim(0, max(bw) / 10)
fig.tight_layout()
fig.savefig("capacity_lower_bound.png", dpi=150)
)py";
}

void write_oracle_report(const std::vector<OracleCheck>& checks, const std::filesystem::path& dir) {
  auto out = open_output(dir / "oracle_report.csv");
  out << timestamp_line();
  out << "schema_version,check,measured,tolerance,passed,detail\n";
  for (const auto& c : checks) {
    out << kSchemaVersion << "," << c.name << "," << format_double(c.measured) << ","
        << format_double(c.tolerance) << "," << (c.passed ? "true" : "false") << ","
        << quote(c.detail) << "\n";
  }
}

}  // namespace ub
