#include "ub/bound_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <omp.h>

#include "ub/block_fading.hpp"
#include "ub/special.hpp"

namespace ub {

namespace {

// Trials per accumulation block. Changing it changes the floating-point
// summation order, so it is a fixed constant (never derived from workers).
constexpr long long kBlockTrials = 32;

struct TrialScalars {
  double l1 = 0.0, l2 = 0.0, l1a = 0.0, l2a = 0.0;
};

struct IndexSums {
  std::vector<double> sum, sumsq, sum_c, sumsq_c;

  explicit IndexSums(std::size_t n = 0) : sum(n), sumsq(n), sum_c(n), sumsq_c(n) {}

  void clear() {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(sumsq.begin(), sumsq.end(), 0.0);
    std::fill(sum_c.begin(), sum_c.end(), 0.0);
    std::fill(sumsq_c.begin(), sumsq_c.end(), 0.0);
  }

  void add(const IndexSums& o) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sumsq[i] += o.sumsq[i];
      sum_c[i] += o.sum_c[i];
      sumsq_c[i] += o.sumsq_c[i];
    }
  }
};

// Simulates one path and feeds each index to `sink(i, sigma_sq, info, clamped)`.
template <class Sink>
inline void run_path(const NormalizedParams& p, Estimator est, RandomStream& rng,
                     long long length, Sink&& sink) {
  double sigma_sq = 1.0;
  for (long long i = 0; i < length; ++i) {
    const double x = rng.exponential(2.0);
    if (est == Estimator::sampled) {
      const double mu = rng.exponential(2.0 * (1.0 - sigma_sq));
      const double info = information_sample(p.snr, mu, x, sigma_sq);
      sink(i, sigma_sq, info, std::max(info, 0.0));
    } else {
      const auto e = conditional_information(p.snr, sigma_sq);
      sink(i, sigma_sq, e.info, e.info_clamped);
    }
    sigma_sq = recursion_step(sigma_sq, x, p.a_sq, p.snr);
  }
}

// Per-trial bound values from one path's per-index samples.
class TrialFolder {
 public:
  explicit TrialFolder(const NormalizedParams& p) : p_(p) {}

  void add(long long i, double info, double clamped) {
    l1_ += info;
    l2_ += clamped;
    if (i < p_.n_truncated) {
      head1_ += info;
      head2_ += clamped;
    } else if (i == p_.n_truncated) {
      tail1_ = info;
      tail2_ = clamped;
    }
  }

  TrialScalars finish() const {
    const double n = static_cast<double>(p_.n);
    const double rest = static_cast<double>(p_.n - p_.n_truncated);
    TrialScalars t;
    t.l1 = l1_ / n;
    t.l2 = l2_ / n;
    t.l1a = rest > 0.0 ? (head1_ + rest * tail1_) / n : t.l1;
    t.l2a = rest > 0.0 ? (head2_ + rest * tail2_) / n : t.l2;
    return t;
  }

 private:
  const NormalizedParams& p_;
  double l1_ = 0.0, l2_ = 0.0, head1_ = 0.0, head2_ = 0.0, tail1_ = 0.0, tail2_ = 0.0;
};

Estimate mean_and_se(double sum, double sumsq, long long count) {
  const double n = static_cast<double>(count);
  const double mean = sum / n;
  if (count < 2) return {mean, 0.0};
  const double var = std::max(0.0, (sumsq - sum * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

Estimate summarize(const std::vector<TrialScalars>& trials, double TrialScalars::*field) {
  double sum = 0.0, sumsq = 0.0;
  for (const auto& t : trials) {
    sum += t.*field;
    sumsq += (t.*field) * (t.*field);
  }
  return mean_and_se(sum, sumsq, static_cast<long long>(trials.size()));
}

BoundResult finalize(const NormalizedParams& p, const IndexSums& sums,
                     const std::vector<TrialScalars>& trials,
                     const std::optional<PrefixGeometry>& prefix) {
  const long long count = static_cast<long long>(trials.size());
  BoundResult r;
  r.trials = count;
  r.info.resize(sums.sum.size());
  r.info_clamped.resize(sums.sum.size());
  for (std::size_t i = 0; i < sums.sum.size(); ++i) {
    r.info[i] = mean_and_se(sums.sum[i], sums.sumsq[i], count);
    r.info_clamped[i] = mean_and_se(sums.sum_c[i], sums.sumsq_c[i], count);
  }
  r.l1 = summarize(trials, &TrialScalars::l1);
  r.l2 = summarize(trials, &TrialScalars::l2);
  r.l1a = summarize(trials, &TrialScalars::l1a);
  r.l2a = summarize(trials, &TrialScalars::l2a);
  const double factor =
      prefix ? cp_penalty(1.0, prefix->block_length_s, prefix->cyclic_prefix_s) : 1.0;
  r.l2b = {r.l2.value * factor, r.l2.se * factor};
  r.c_csi = perfect_csi_capacity(p.snr);
  if (r.c_csi > 0.0) {
    r.fraction_of_csi = {r.l2b.value / r.c_csi, r.l2b.se / r.c_csi};
  }
  return r;
}

}  // namespace

void NormalizedParams::validate() const {
  if (!(snr >= 0.0) || !std::isfinite(snr)) throw std::invalid_argument("snr must be finite and >= 0");
  if (!(a_sq >= 0.0 && a_sq <= 1.0)) throw std::invalid_argument("|a|^2 must lie in [0, 1]");
  if (n < 1) throw std::invalid_argument("N must be >= 1");
  if (n_truncated < 1 || n_truncated > n) throw std::invalid_argument("N'' must lie in [1, N]");
}

NormalizedParams normalize(const PhysicalParams& p) {
  if (!(p.sigma_z_sq >= 0.0 && p.sigma_x_sq >= 0.0 && p.sigma_n_sq > 0.0)) {
    throw std::invalid_argument("variances must be >= 0 (noise variance > 0)");
  }
  return {p.sigma_z_sq * p.sigma_x_sq / p.sigma_n_sq, p.a_sq, p.n, p.n_truncated};
}

double recursion_step(double sigma_prev_sq, double x_norm_sq, double a_sq, double snr) {
  const double precision = sigma_prev_sq > 0.0 ? 1.0 / sigma_prev_sq + snr * x_norm_sq : 0.0;
  const double inner = sigma_prev_sq > 0.0 ? 1.0 / precision : 0.0;
  return (1.0 - a_sq) + a_sq * inner;
}

double information_sample(double snr, double mu_norm_sq, double x_norm_sq, double sigma_sq) {
  return (std::log1p(snr * mu_norm_sq) - std::log1p(snr * x_norm_sq * sigma_sq)) /
         std::numbers::ln2;
}

InformationPair conditional_information(double snr, double sigma_sq) {
  if (snr == 0.0) return {0.0, 0.0};
  // E[log(1 + snr |mu|^2)] with |mu|^2 ~ Exp(mean m) is E1s(1/(snr m)).
  const double m = 2.0 * (1.0 - sigma_sq);
  const double gain = m > 0.0 ? expint_e1_scaled(1.0 / (snr * m)) : 0.0;
  const double noise_arg = sigma_sq > 0.0 ? 1.0 / (2.0 * snr * sigma_sq) : 0.0;
  const double loss = sigma_sq > 0.0 ? expint_e1_scaled(noise_arg) : 0.0;
  // E[(log(1 + snr mu) - log(1 + snr x sigma^2))^+] over both exponentials.
  double clamped = 0.0;
  if (m > 0.0) {
    clamped = sigma_sq > 0.0 ? gain - expint_e1_scaled(1.0 / (snr * m) + noise_arg) : gain;
  }
  return {(gain - loss) / std::numbers::ln2, clamped / std::numbers::ln2};
}

std::vector<PathSample> sample_path_terms(const NormalizedParams& p, RandomStream& rng,
                                          long long length) {
  p.validate();
  if (length < 0) length = p.n;
  std::vector<PathSample> out;
  out.reserve(static_cast<std::size_t>(length));
  run_path(p, Estimator::sampled, rng, length,
           [&](long long, double sigma_sq, double info, double clamped) {
             out.push_back({sigma_sq, info, clamped});
           });
  return out;
}

BoundResult estimate_bounds(const NormalizedParams& p, const McConfig& mc,
                            const std::optional<PrefixGeometry>& prefix) {
  p.validate();
  if (mc.trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int workers = std::max(1, mc.workers);
  const std::size_t n = static_cast<std::size_t>(p.n);
  const long long blocks = (mc.trials + kBlockTrials - 1) / kBlockTrials;
  // Block buffers alive at once; bounded by memory, irrelevant to results.
  const long long wave_cap =
      std::clamp<long long>((1LL << 24) / static_cast<long long>(4 * n), 1, 64);

  std::vector<TrialScalars> trials(static_cast<std::size_t>(mc.trials));
  IndexSums total(n);
  std::vector<IndexSums> wave_sums;

  for (long long wave_start = 0; wave_start < blocks; wave_start += wave_cap) {
    const long long wave = std::min(wave_cap, blocks - wave_start);
    if (static_cast<long long>(wave_sums.size()) < wave) wave_sums.resize(wave, IndexSums(n));

#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
    for (long long b = 0; b < wave; ++b) {
      IndexSums& acc = wave_sums[static_cast<std::size_t>(b)];
      acc.clear();
      const long long first = (wave_start + b) * kBlockTrials;
      const long long last = std::min(first + kBlockTrials, mc.trials);
      for (long long t = first; t < last; ++t) {
        RandomStream rng(mc.master_seed, static_cast<std::uint64_t>(t));
        TrialFolder fold(p);
        run_path(p, mc.estimator, rng, p.n, [&](long long i, double, double info, double clamped) {
          const auto k = static_cast<std::size_t>(i);
          acc.sum[k] += info;
          acc.sumsq[k] += info * info;
          acc.sum_c[k] += clamped;
          acc.sumsq_c[k] += clamped * clamped;
          fold.add(i, info, clamped);
        });
        trials[static_cast<std::size_t>(t)] = fold.finish();
      }
    }
    for (long long b = 0; b < wave; ++b) total.add(wave_sums[static_cast<std::size_t>(b)]);
  }
  return finalize(p, total, trials, prefix);
}

BoundResult estimate_bounds(const PhysicalParams& p, const McConfig& mc,
                            const std::optional<PrefixGeometry>& prefix) {
  return estimate_bounds(normalize(p), mc, prefix);
}

BoundResult estimate_bounds_reference(const NormalizedParams& p, const McConfig& mc,
                                      const std::optional<PrefixGeometry>& prefix) {
  p.validate();
  if (mc.trials < 1) throw std::invalid_argument("trials must be >= 1");
  IndexSums total(static_cast<std::size_t>(p.n));
  std::vector<TrialScalars> trials;
  trials.reserve(static_cast<std::size_t>(mc.trials));
  for (long long t = 0; t < mc.trials; ++t) {
    RandomStream rng(mc.master_seed, static_cast<std::uint64_t>(t));
    std::vector<PathSample> path;
    if (mc.estimator == Estimator::sampled) {
      path = sample_path_terms(p, rng);
    } else {
      double sigma_sq = 1.0;
      for (long long i = 0; i < p.n; ++i) {
        const double x = rng.exponential(2.0);
        const auto e = conditional_information(p.snr, sigma_sq);
        path.push_back({sigma_sq, e.info, e.info_clamped});
        sigma_sq = recursion_step(sigma_sq, x, p.a_sq, p.snr);
      }
    }
    TrialFolder fold(p);
    for (std::size_t i = 0; i < path.size(); ++i) {
      total.sum[i] += path[i].info;
      total.sumsq[i] += path[i].info * path[i].info;
      total.sum_c[i] += path[i].info_clamped;
      total.sumsq_c[i] += path[i].info_clamped * path[i].info_clamped;
      fold.add(static_cast<long long>(i), path[i].info, path[i].info_clamped);
    }
    trials.push_back(fold.finish());
  }
  return finalize(p, total, trials, prefix);
}

double perfect_csi_capacity(double snr) {
  if (!(snr >= 0.0)) throw std::invalid_argument("perfect_csi_capacity: snr must be >= 0");
  if (snr == 0.0) return 0.0;
  return expint_e1_scaled(1.0 / (2.0 * snr)) / std::numbers::ln2;
}

Estimate perfect_csi_capacity_mc(double snr, long long trials, std::uint64_t seed) {
  if (!(snr >= 0.0)) throw std::invalid_argument("perfect_csi_capacity_mc: snr must be >= 0");
  if (trials < 1) throw std::invalid_argument("perfect_csi_capacity_mc: trials must be >= 1");
  RandomStream rng(seed, 0);
  double sum = 0.0, sumsq = 0.0;
  for (long long t = 0; t < trials; ++t) {
    const double v = std::log1p(snr * rng.exponential(2.0)) / std::numbers::ln2;
    sum += v;
    sumsq += v * v;
  }
  return mean_and_se(sum, sumsq, trials);
}

}  // namespace ub
