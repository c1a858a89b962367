#include "ub/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace ub {

namespace {

constexpr double kDetGuard = 1e-300;
constexpr double kSymmetryTol = 1e-12;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

Mat2 inverse(const Mat2& m) {
  const double det = m.det();
  if (!(std::abs(det) >= kDetGuard)) {
    throw SingularMatrixError("2x2 matrix is singular");
  }
  const double inv = 1.0 / det;
  return {m.m11 * inv, -m.m01 * inv, -m.m10 * inv, m.m00 * inv};
}

Vec2 symmetric_eigenvalues(const Mat2& m) {
  const double half_trace = 0.5 * (m.m00 + m.m11);
  const double half_diff = 0.5 * (m.m00 - m.m11);
  const double off = 0.5 * (m.m01 + m.m10);
  const double radius = std::hypot(half_diff, off);
  return {half_trace - radius, half_trace + radius};
}

RotScale2 to_matrix(Complex z) {
  if (!finite(z)) throw std::invalid_argument("to_matrix: non-finite complex value");
  return RotScale2(z);
}

Complex sample_zmcs(const ZmcsGaussian& dist, RandomStream& rng) {
  if (dist.variance_per_component < 0.0) {
    throw std::invalid_argument("sample_zmcs: negative variance");
  }
  if (dist.variance_per_component == 0.0) return {0.0, 0.0};
  const double sd = std::sqrt(dist.variance_per_component);
  const double re = rng.normal();
  const double im = rng.normal();
  return {sd * re, sd * im};
}

Vec2 sample(const Gaussian2& g, RandomStream& rng) {
  const Mat2& c = g.cov;
  if (c.m00 == 0.0 && c.m01 == 0.0 && c.m10 == 0.0 && c.m11 == 0.0) return g.mean;
  // Lower Cholesky factor; tolerate a singular (PSD) covariance.
  const double l00 = std::sqrt(std::max(c.m00, 0.0));
  const double l10 = l00 > 0.0 ? c.m10 / l00 : 0.0;
  const double l11 = std::sqrt(std::max(c.m11 - l10 * l10, 0.0));
  const double u0 = rng.normal();
  const double u1 = rng.normal();
  return {g.mean[0] + l00 * u0, g.mean[1] + l10 * u0 + l11 * u1};
}

Gaussian2 fuse(const Gaussian2& prior, const Likelihood& likelihood) {
  if (std::holds_alternative<Uninformative>(likelihood)) return prior;
  const auto& lik = std::get<Gaussian2>(likelihood);
  Mat2 prior_info, lik_info;
  try {
    prior_info = inverse(prior.cov);
    lik_info = inverse(lik.cov);
  } catch (const SingularMatrixError&) {
    throw DegenerateFusionError("fuse: singular covariance cannot be fused in information form");
  }
  const Mat2 post_cov = inverse(prior_info + lik_info);
  const Vec2 a = prior_info * prior.mean;
  const Vec2 b = lik_info * lik.mean;
  return {post_cov * Vec2{a[0] + b[0], a[1] + b[1]}, post_cov};
}

bool is_pds(const Mat2& m) {
  if (!(std::isfinite(m.m00) && std::isfinite(m.m01) && std::isfinite(m.m10) &&
        std::isfinite(m.m11))) {
    return false;
  }
  if (std::abs(m.m01 - m.m10) > kSymmetryTol) return false;
  return symmetric_eigenvalues(m)[0] > 0.0;
}

Mat2 random_pds(RandomStream& rng) {
  const Mat2 g{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
               2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
  Mat2 d = g.transpose() * g + Mat2::scaled_identity(1e-9);
  d.m10 = d.m01;  // exact symmetry
  return d;
}

Mat2 random_contraction_pds(RandomStream& rng) {
  constexpr double kMargin = 1e-6;
  const Mat2 d = random_pds(rng);
  const double lambda_max = symmetric_eigenvalues(d)[1];
  double u = rng.uniform();
  while (u == 0.0) u = rng.uniform();
  return (u / (lambda_max + kMargin)) * d;
}

bool inverse_complement_is_pds(const Mat2& d) {
  Mat2 m = inverse(Mat2::identity() - d) - Mat2::identity();
  m.m10 = m.m01 = 0.5 * (m.m01 + m.m10);
  return is_pds(m);
}

bool resolvent_complement_is_pds(const Mat2& d) {
  Mat2 m = Mat2::identity() - inverse(Mat2::identity() + d);
  m.m10 = m.m01 = 0.5 * (m.m01 + m.m10);
  return is_pds(m);
}

bool complement_det_below_one(const Mat2& d) {
  return (Mat2::identity() - d).det() < 1.0;
}

}  // namespace ub
