#pragma once

// Lower bounds on the noncoherent rate of the Gauss-Markov subcarrier
// channel. Everything is in normalized units: x' = x / sigma_x,
// sigma'^2 = sigma^2 / sigma_z^2, mu''' = mu / sigma_z, and the only channel
// knob left is snr = sigma_z^2 sigma_x^2 / sigma_n^2.

#include <cstdint>
#include <optional>
#include <vector>

#include "ub/random.hpp"

namespace ub {

struct NormalizedParams {
  double snr = 0.0;
  double a_sq = 1.0;           // |a|^2
  long long n = 1;             // subcarriers
  long long n_truncated = 1;   // N'' for the truncated-sum bounds

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

// Physical variances; collapsed to NormalizedParams by `normalize`.
struct PhysicalParams {
  double sigma_z_sq = 1.0;
  double sigma_x_sq = 1.0;
  double sigma_n_sq = 1.0;
  double a_sq = 1.0;
  long long n = 1;
  long long n_truncated = 1;
};

NormalizedParams normalize(const PhysicalParams& p);

enum class Estimator {
  // Simulate the sigma'^2 path; integrate mu''' and x' out exactly.
  conditional,
  // Draw |x'|^2 and |mu'''|^2 and average the raw log-ratio samples.
  sampled
};

struct McConfig {
  long long trials = 1000;
  std::uint64_t master_seed = 1;
  int workers = 1;
  Estimator estimator = Estimator::conditional;
};

// Cyclic prefix geometry used for the L2B penalty.
struct PrefixGeometry {
  double block_length_s = 0.0;
  double cyclic_prefix_s = 0.0;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct BoundResult {
  std::vector<Estimate> info;          // E[I_i] per index
  std::vector<Estimate> info_clamped;  // E[I'_i] per index
  Estimate l1, l2, l1a, l2a, l2b;
  double c_csi = 0.0;
  Estimate fraction_of_csi;            // L2B / C_csi
  long long trials = 0;

  friend bool operator==(const BoundResult&, const BoundResult&) = default;
};

// sigma'_i^2 = (1 - a_sq) + a_sq / (1/sigma'_{i-1}^2 + snr |x'_{i-1}|^2).
double recursion_step(double sigma_prev_sq, double x_norm_sq, double a_sq, double snr);

// One information-term sample:
//   log2((snr |mu'''|^2 + 1) / (snr |x'|^2 sigma'^2 + 1)).
double information_sample(double snr, double mu_norm_sq, double x_norm_sq, double sigma_sq);

struct InformationPair {
  double info;          // E[I_i | sigma'^2]
  double info_clamped;  // E[I'_i | sigma'^2]
};

// Closed-form expectation of the information samples over x' and mu'''
// given sigma'^2, using e^z E1(z).
InformationPair conditional_information(double snr, double sigma_sq);

struct PathSample {
  double sigma_sq;      // sigma'_i^2 before observing index i
  double info;          // I_i sample
  double info_clamped;  // max(I_i sample, 0)
};

// One Monte Carlo path of `length` indices (default p.n).
std::vector<PathSample> sample_path_terms(const NormalizedParams& p, RandomStream& rng,
                                          long long length = -1);

// Parallel estimator. Bit-identical for fixed (params, trials, master_seed)
// whatever the worker count.
BoundResult estimate_bounds(const NormalizedParams& p, const McConfig& mc,
                            const std::optional<PrefixGeometry>& prefix = std::nullopt);

BoundResult estimate_bounds(const PhysicalParams& p, const McConfig& mc,
                            const std::optional<PrefixGeometry>& prefix = std::nullopt);

// Plain serial estimator, kept as the reference for the parallel kernel.
BoundResult estimate_bounds_reference(const NormalizedParams& p, const McConfig& mc,
                                      const std::optional<PrefixGeometry>& prefix = std::nullopt);

// E[log2(1 + snr |z|^2)], |z|^2 exponential with mean 2. Closed form via E1.
double perfect_csi_capacity(double snr);

Estimate perfect_csi_capacity_mc(double snr, long long trials, std::uint64_t seed);

}  // namespace ub
