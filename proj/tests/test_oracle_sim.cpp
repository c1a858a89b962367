#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "ub/bound_engine.hpp"
#include "ub/oracle_sim.hpp"

using namespace ub;

namespace {

// Mean of E[z_i conj(z_{i-1})] with a batch-means standard error.
struct LagOne {
  Complex mean;
  double se_re, se_im;
};

LagOne lag_one(const ChannelTrace& t, std::size_t batch) {
  const std::size_t batches = (t.size() - 1) / batch;
  double s_re = 0, s_im = 0, q_re = 0, q_im = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 1 + b * batch; i < 1 + (b + 1) * batch; ++i) acc += t.z[i] * std::conj(t.z[i - 1]);
    acc /= static_cast<double>(batch);
    s_re += acc.real();
    s_im += acc.imag();
    q_re += acc.real() * acc.real();
    q_im += acc.imag() * acc.imag();
  }
  const double n = static_cast<double>(batches);
  const Complex m{s_re / n, s_im / n};
  return {m, std::sqrt((q_re / n - m.real() * m.real()) / (n - 1)),
          std::sqrt((q_im / n - m.imag() * m.imag()) / (n - 1))};
}

}  // namespace

TEST_CASE("simulate: outputs, lag-one correlation") {
  RandomStream rng(1, 0);
  const auto quiet = simulate(FrequencyCorrelation::from({0.5, 0.0}, 1.0), 0.0, 0.0, 100, rng);
  for (const auto& y : quiet.y) CHECK(y == Complex(0.0, 0.0));

  const auto t = simulate(FrequencyCorrelation::from({0.3, 0.4}, 0.8), 0.5, 0.2, 1000, rng);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.y[i] == t.z[i] * t.x[i] + t.n[i]);

  for (double a : {0.0, 0.7}) {
    const double s = 0.8;
    const auto long_trace = simulate(FrequencyCorrelation::from({a, 0.0}, s), 1.0, 1.0, 1000000, rng);
    const LagOne l = lag_one(long_trace, 1000);
    CAPTURE(a);
    CHECK(std::abs(l.mean.real() - 2.0 * s * a) < 3.0 * l.se_re);
    CHECK(std::abs(l.mean.imag()) < 3.0 * l.se_im);
  }
}

TEST_CASE("simulate: stationary marginal variance") {
  const double s = 1.3;
  const auto fc = FrequencyCorrelation::from(std::polar(0.95, 0.4), s);
  constexpr int kTraces = 20000;
  const std::size_t probe[] = {0, 1, 10, 49};
  double sum[4] = {}, sumsq[4] = {};
  for (int k = 0; k < kTraces; ++k) {
    RandomStream rng(2, static_cast<std::uint64_t>(k));
    const auto t = simulate(fc, 1.0, 1.0, 50, rng);
    for (int p = 0; p < 4; ++p) {
      const double v = t.z[probe[p]].real() * t.z[probe[p]].real();
      sum[p] += v;
      sumsq[p] += v * v;
    }
  }
  for (int p = 0; p < 4; ++p) {
    const double m = sum[p] / kTraces;
    const double se = std::sqrt((sumsq[p] / kTraces - m * m) / (kTraces - 1));
    CAPTURE(probe[p]);
    CHECK(std::abs(m - s) < 3.0 * se);
  }
}

TEST_CASE("track: prior, decorrelated channel, skipped measurements") {
  RandomStream rng(3, 0);
  const auto fc = FrequencyCorrelation::from(std::polar(0.9, 1.0), 0.7);
  const auto one = simulate(fc, 1.0, 1.0, 1, rng);
  const auto p1 = track(one, fc, 1.0);
  REQUIRE(p1.size() == 1);
  CHECK(p1[0].mean == Vec2{0.0, 0.0});
  CHECK(p1[0].cov == Mat2::scaled_identity(0.7));

  const auto fc0 = FrequencyCorrelation::from({0.0, 0.0}, 0.7);
  const auto t0 = simulate(fc0, 1.0, 0.1, 200, rng);
  for (const auto& g : track(t0, fc0, 0.1)) {
    CHECK(g.mean == Vec2{0.0, 0.0});
    CHECK(g.cov == Mat2::scaled_identity(0.7));
  }

  ChannelTrace manual = simulate(fc, 1.0, 1.0, 3, rng);
  manual.x[0] = {0.0, 0.0};
  manual.y[0] = manual.n[0];
  const auto post = track(manual, fc, 1.0);
  // Prediction only: cov = |a|^2 s + s(1 - |a|^2) = s, mean stays zero.
  CHECK(post[1].cov.m00 == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(post[1].mean[0] == 0.0);
  CHECK(post[2].cov.m00 < 0.7);
}

TEST_CASE("track: noiseless measurements pin the state") {
  RandomStream rng(4, 0);
  const auto fc = FrequencyCorrelation::from({0.6, 0.0}, 1.0);
  const auto t = simulate(fc, 1.0, 0.0, 5, rng);
  const auto post = track(t, fc, 0.0);
  for (std::size_t i = 1; i < post.size(); ++i) {
    CHECK(post[i].cov.m00 == doctest::Approx(1.0 - 0.36).epsilon(1e-14));
    const Complex expect = 0.6 * t.z[i - 1];
    CHECK(std::abs(to_complex(post[i].mean) - expect) < 1e-12);
  }
}

TEST_CASE("track: posterior variance follows the normalized recursion") {
  double worst = 0.0;
  for (int k = 0; k < 30; ++k) {
    RandomStream rng(5, static_cast<std::uint64_t>(k));
    const double a_sq = std::array{0.0, 0.5, 1.0 - 1e-6}[k % 3];
    const double snr = std::array{1e-3, 1e-2, 1.0}[(k / 3) % 3];
    const double sz = 0.5 + rng.uniform(), sn = 0.5 + rng.uniform();
    const double sx = snr * sn / sz;
    const auto fc = FrequencyCorrelation::from(std::polar(std::sqrt(a_sq), 6.0 * rng.uniform()), sz);
    const auto t = simulate(fc, sx, sn, 1000, rng);
    const auto post = track(t, fc, sn);
    double chain = 1.0;
    for (std::size_t i = 0; i < post.size(); ++i) {
      if (i) chain = recursion_step(chain, std::norm(t.x[i - 1]) / sx, fc.a_sq(), sz * sx / sn);
      worst = std::max(worst, std::abs(post[i].cov.m00 / sz - chain) / chain);
      CHECK(post[i].cov.m00 == post[i].cov.m11);
      CHECK(std::abs(post[i].cov.m01) <= 1e-14 * sz);
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("exact_conditional_mi anchors") {
  CHECK(exact_conditional_mi(0.5, {0.3, 0.1}, 0.0, 1.0).bits == 0.0);
  CHECK_THROWS_AS(exact_conditional_mi(0.5, {0.3, 0.1}, 1.0, 0.0), std::invalid_argument);

  for (double mu : {0.1, 1.0, 3.0}) {
    const double sx = 0.7, sn = 0.9;
    const MiResult r = exact_conditional_mi(0.0, std::polar(mu, 0.3), sx, sn);
    CAPTURE(mu);
    CHECK(r.bits == doctest::Approx(std::log2(1.0 + mu * mu * sx / sn)).epsilon(1e-6).scale(1e-4));
    CHECK(r.error_estimate < 1e-4);
  }

  // The phase of mu_hat does not matter.
  const double a = exact_conditional_mi(0.3, std::polar(0.8, 0.0), 1.0, 1.0).bits;
  const double b = exact_conditional_mi(0.3, std::polar(0.8, 2.0), 1.0, 1.0).bits;
  CHECK(a == b);

  QuadratureSpec coarse;
  coarse.input_nodes = 10;
  coarse.radial_nodes = 10;
  coarse.tolerance = 1e-12;
  CHECK_THROWS_AS(exact_conditional_mi(0.3, {1.0, 0.0}, 1.0, 1.0, coarse), QuadraturePrecisionError);
}

TEST_CASE("exact MI dominates the per-index bound at realized tracker states") {
  const double sz = 1.0, sn = 1.0, sx = 1.0;
  const auto fc = FrequencyCorrelation::from({0.999, 0.0}, sz);
  for (int k = 0; k < 4; ++k) {
    RandomStream rng(6, static_cast<std::uint64_t>(k));
    const auto t = simulate(fc, sx, sn, 1 + 10 * k, rng);
    const Gaussian2 g = track(t, fc, sn).back();
    const MiResult mi = exact_conditional_mi(g.cov.m00, to_complex(g.mean), sx, sn);
    double sum = 0.0, sumsq = 0.0;
    const int n = 200000;
    for (int s = 0; s < n; ++s) {
      const double v = information_sample(sz * sx / sn, std::norm(to_complex(g.mean)) / sz,
                                          rng.exponential(2.0), g.cov.m00 / sz);
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sumsq / n - mean * mean) / (n - 1));
    CHECK(mi.bits >= mean - 3.0 * se);
  }
}

TEST_CASE("write_trace_csv") {
  RandomStream rng(7, 0);
  const auto fc = FrequencyCorrelation::from({0.9, 0.0}, 1.0);
  ChannelTrace t = simulate(fc, 1.0, 1.0, 5, rng);
  t.posterior = track(t, fc, 1.0);
  const auto path = std::filesystem::temp_directory_path() / "ub_trace.csv";
  write_trace_csv(t, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "schema_version,index,z_re,z_im,x_re,x_im,y_re,y_im,posterior_var");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind("1," + std::to_string(rows) + ",", 0) == 0);
    ++rows;
  }
  CHECK(rows == 5);
}
