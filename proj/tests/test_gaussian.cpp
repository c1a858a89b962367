#include <doctest.h>

#include <cmath>

#include "ub/gaussian.hpp"

using namespace ub;

namespace {

// Independent 2x2 inverse: Gauss-Jordan elimination with partial pivoting.
Mat2 gauss_jordan_inverse(const Mat2& m) {
  double a[2][4] = {{m.m00, m.m01, 1.0, 0.0}, {m.m10, m.m11, 0.0, 1.0}};
  if (std::abs(a[1][0]) > std::abs(a[0][0])) std::swap(a[0], a[1]);
  for (int r = 0; r < 2; ++r) {
    const double p = a[r][r];
    for (double& v : a[r]) v /= p;
    const int o = 1 - r;
    const double f = a[o][r];
    for (int c = 0; c < 4; ++c) a[o][c] -= f * a[r][c];
  }
  return {a[0][2], a[0][3], a[1][2], a[1][3]};
}

Complex random_complex(RandomStream& rng) { return {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0}; }

}  // namespace

TEST_CASE("to_matrix") {
  CHECK(to_matrix({1.0, 0.0}).matrix() == Mat2::identity());
  CHECK(to_matrix({0.0, 1.0}).matrix() == Mat2{0.0, -1.0, 1.0, 0.0});
  CHECK_THROWS_AS(to_matrix({NAN, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(to_matrix({0.0, INFINITY}), std::invalid_argument);

  RandomStream rng(3, 0);
  for (int t = 0; t < 10000; ++t) {
    const Complex z = random_complex(rng), w = random_complex(rng);
    const Vec2 zw = to_matrix(z) * to_vec(w);
    const Vec2 wz = to_matrix(w) * to_vec(z);
    CHECK(std::abs(zw[0] - (z * w).real()) <= 1e-15);
    CHECK(std::abs(zw[1] - (z * w).imag()) <= 1e-15);
    CHECK(std::abs(zw[0] - wz[0]) <= 1e-14);
    CHECK(std::abs(zw[1] - wz[1]) <= 1e-14);
    const Mat2 m = to_matrix(z).matrix();
    CHECK(m.m00 == m.m11);
    CHECK(m.m01 == -m.m10);
  }
}

TEST_CASE("sample_zmcs moments") {
  RandomStream rng(11, 0);
  CHECK(sample_zmcs({0.0}, rng) == Complex(0.0, 0.0));

  constexpr int kSamples = 1000000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const double m = std::norm(sample_zmcs({1.0}, rng));
    s += m;
    s2 += m * m;
  }
  const double mean = s / kSamples;
  const double se = std::sqrt((s2 / kSamples - mean * mean) / (kSamples - 1));
  CHECK(std::abs(mean - 2.0) < 3.0 * se);

  double rr = 0.0, ii = 0.0, ri = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    const Complex z = sample_zmcs({0.5}, rng);
    rr += z.real() * z.real();
    ii += z.imag() * z.imag();
    ri += z.real() * z.imag();
  }
  // Each entry estimate has sd <= 0.5*sqrt(2/n).
  const double tol = 4.0 * 0.5 * std::sqrt(2.0 / kSamples);
  CHECK(std::abs(rr / kSamples - 0.5) < tol);
  CHECK(std::abs(ii / kSamples - 0.5) < tol);
  CHECK(std::abs(ri / kSamples) < tol);
}

TEST_CASE("sample with zero covariance returns the mean") {
  RandomStream rng(1, 1);
  const Gaussian2 g{{0.25, -3.0}, Mat2{}};
  CHECK(sample(g, rng) == Vec2{0.25, -3.0});
}

TEST_CASE("fuse") {
  const Gaussian2 prior{{1.0, 2.0}, Mat2{2.0, 0.3, 0.3, 1.0}};
  const Gaussian2 same = fuse(prior, Uninformative{});
  CHECK(same.mean == prior.mean);
  CHECK(same.cov == prior.cov);

  const Gaussian2 half = fuse(Gaussian2::isotropic({0, 0}, 3.0), Gaussian2::isotropic({0, 0}, 3.0));
  CHECK(half.mean[0] == doctest::Approx(0.0));
  CHECK(half.mean[1] == doctest::Approx(0.0));
  CHECK(half.cov.m00 == doctest::Approx(1.5));
  CHECK(half.cov.m11 == doctest::Approx(1.5));
  CHECK(half.cov.m01 == doctest::Approx(0.0));

  CHECK_THROWS_AS(fuse(Gaussian2{{0, 0}, Mat2{}}, Gaussian2{{0, 0}, Mat2{}}), DegenerateFusionError);

  RandomStream rng(17, 0);
  for (int t = 0; t < 2000; ++t) {
    const Gaussian2 a{{rng.normal(), rng.normal()}, random_pds(rng)};
    const Gaussian2 b{{rng.normal(), rng.normal()}, random_pds(rng)};
    if (std::abs(a.cov.det()) < 1e-6 || std::abs(b.cov.det()) < 1e-6) continue;
    const Mat2 ia = gauss_jordan_inverse(a.cov), ib = gauss_jordan_inverse(b.cov);
    const Mat2 cov = gauss_jordan_inverse(ia + ib);
    const Vec2 ha = ia * a.mean, hb = ib * b.mean;
    const Vec2 mean = cov * Vec2{ha[0] + hb[0], ha[1] + hb[1]};
    const Gaussian2 f = fuse(a, b);
    const double scale = 1.0 + std::abs(cov.m00) + std::abs(cov.m11);
    CHECK(std::abs(f.cov.m00 - cov.m00) < 1e-9 * scale);
    CHECK(std::abs(f.cov.m01 - cov.m01) < 1e-9 * scale);
    CHECK(std::abs(f.cov.m11 - cov.m11) < 1e-9 * scale);
    CHECK(std::abs(f.mean[0] - mean[0]) < 1e-8 * (1.0 + std::abs(mean[0])));
    CHECK(std::abs(f.mean[1] - mean[1]) < 1e-8 * (1.0 + std::abs(mean[1])));

    // Fusion never increases variance.
    const Vec2 ep = symmetric_eigenvalues(a.cov), ef = symmetric_eigenvalues(f.cov);
    CHECK(ef[0] <= ep[0] + 1e-12);
    CHECK(ef[1] <= ep[1] + 1e-12);
  }
}

TEST_CASE("inverse") {
  const Mat2 m{4.0, 7.0, 2.0, 6.0};
  const Mat2 p = m * inverse(m);
  CHECK(p.m00 == doctest::Approx(1.0));
  CHECK(p.m01 == doctest::Approx(0.0));
  CHECK(p.m10 == doctest::Approx(0.0));
  CHECK(p.m11 == doctest::Approx(1.0));
  CHECK_THROWS_AS(inverse(Mat2{1.0, 2.0, 2.0, 4.0}), SingularMatrixError);
}

TEST_CASE("is_pds") {
  CHECK(is_pds(Mat2::identity()));
  CHECK_FALSE(is_pds(Mat2{1.0, 2.0, 2.0, 1.0}));
  CHECK_FALSE(is_pds(Mat2{1.0, 0.1, 0.0, 1.0}));
  CHECK_FALSE(is_pds(Mat2{}));

  RandomStream rng(23, 0);
  for (int t = 0; t < 1000; ++t) {
    // Full-rank Gram matrix built here independently of random_pds.
    const Mat2 g{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    if (std::abs(g.det()) < 1e-3) continue;
    CHECK(is_pds(g.transpose() * g));
  }
}

TEST_CASE("matrix predicates hold on constrained random instances") {
  RandomStream rng(29, 0);
  for (int t = 0; t < 10000; ++t) {
    const Mat2 c = random_contraction_pds(rng);
    REQUIRE(is_pds(c));
    REQUIRE(is_pds(Mat2::identity() - c));
    CHECK(inverse_complement_is_pds(c));
    CHECK(complement_det_below_one(c));
    const Mat2 d = random_pds(rng);
    REQUIRE(is_pds(d));
    CHECK(resolvent_complement_is_pds(d));
  }
}

TEST_CASE("matrix predicates reject violated preconditions") {
  // I - D is indefinite: (I - D)^-1 - I is not PDS.
  CHECK_FALSE(inverse_complement_is_pds(Mat2{1.5, 0.0, 0.0, 0.5}));
  // D with a negative eigenvalue: I - (I + D)^-1 loses definiteness.
  CHECK_FALSE(resolvent_complement_is_pds(Mat2{-0.5, 0.0, 0.0, 1.0}));
  // det(I - D) = 1.2 * 1 when D = diag(-0.2, 0).
  CHECK_FALSE(complement_det_below_one(Mat2{-0.2, 0.0, 0.0, 0.0}));
}
