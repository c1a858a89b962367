#pragma once

// Reproduction harness: configuration, parameter derivation, bound sweeps
// and the oracle suites. Used by the `ubound` CLI and the acceptance tests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ub/block_fading.hpp"
#include "ub/bound_engine.hpp"
#include "ub/channel_model.hpp"

namespace ub {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Flat key/value settings. Later layers override earlier ones.
class ConfigLayers {
 public:
  // Reads `key = value` lines; '#' starts a comment.
  void load_file(const std::filesystem::path& path);
  // Applies UB_<KEY> environment variables for every known key.
  void load_env();
  void set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct ExperimentConfig {
  // Power delay profile.
  std::string pdp_kind = "exponential";
  double tau_c = 1.7e-8;
  std::string pdp_table;
  std::optional<double> tau_t;  // defaults to the cyclic prefix

  // Block fading / OFDM.
  double bandwidth = 5e6;
  double block_length = 5.3e-3;
  double cyclic_prefix = 2e-7;
  double snr = 1.8e-2;
  double coherence_fraction = 0.99;
  SpacingConvention convention = SpacingConvention::cyclic;

  // Monte Carlo.
  long long trials = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  Estimator estimator = Estimator::conditional;

  // Sweep.
  std::vector<long long> sweep_n;  // empty: log-spaced default
  int sweep_points = 20;
  long long n_truncated = 2000;
  bool parallel_points = false;

  // Oracle suite.
  int oracle_traces = 100;
  long long oracle_trace_length = 1000;
  std::vector<double> oracle_a_sq{0.0, 0.5, 1.0 - 1e-6};
  std::vector<double> oracle_snr{1e-3, 1e-2, 1.0};
  int oracle_mi_states = 20;
  int oracle_matrix_trials = 10000;
  double corrupt_recursion = 1.0;  // test hook: scales sigma'^2 in the recursion chain

  std::filesystem::path out = "out";

  static const std::vector<std::string>& keys();
  static ExperimentConfig from(const ConfigLayers& layers);
  // Echo in `key = value` form (deterministic order).
  std::string to_text() const;
};

// Channel, grid and SNR budget derived from the fundamentals.
struct DerivedParameters {
  OfdmConfig grid;
  PowerDelayProfile profile;  // truncated at tau_t when one applies
  double tau_t = 0.0;         // +inf when untruncated
  double e_trunc = 0.0;
  SnrBudget budget;
  FrequencyCorrelation correlation;
  double cp_factor = 1.0;
  double c_csi = 0.0;
  std::vector<std::string> warnings;

  NormalizedParams normalized(long long n, long long n_truncated) const;
  PrefixGeometry prefix() const { return {grid.block_length_s, grid.cyclic_prefix_s}; }
};

DerivedParameters derive(const ExperimentConfig& cfg);

struct ReportRow {
  std::string group;
  std::string name;
  double value;
  std::string unit;
  std::string formula;
};

struct ParameterReport {
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
};

ParameterReport derive_parameters(const ExperimentConfig& cfg);

struct SweepRow {
  long long n;
  long long n_truncated;
  double bandwidth_hz;
  BoundResult bounds;
  double wall_time_s;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool fraction_monotone = true;  // fraction_of_csi non-decreasing within 3 SE
};

// Sweep points: explicit list or `points` log-spaced values in [10, n_max].
std::vector<long long> sweep_points(const ExperimentConfig& cfg, long long n_max);

SweepResult run_bound_sweep(const ExperimentConfig& cfg);

struct OracleCheck {
  std::string name;
  double measured;
  double tolerance;
  bool passed;
  std::string detail;
};

std::vector<OracleCheck> run_oracle_suite(const ExperimentConfig& cfg);

// Output writers. Each CSV starts with a `# generated_at=...` line.
void write_parameter_report(const ParameterReport& report, const ExperimentConfig& cfg,
                            const std::filesystem::path& dir);
void write_sweep(const SweepResult& sweep, const ExperimentConfig& cfg,
                 const std::filesystem::path& dir);
void write_oracle_report(const std::vector<OracleCheck>& checks, const std::filesystem::path& dir);

// %.17g formatting.
std::string format_double(double v);

}  // namespace ub
