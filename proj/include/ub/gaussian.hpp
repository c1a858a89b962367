#pragma once

// Real-vector view of complex scalars and the 2x2 Gaussian algebra used by
// the channel tracker. A complex number z = re + j*im is the vector
// [re, im]; its multiplication operator is the matrix [[re, -im], [im, re]].

#include <array>
#include <complex>
#include <stdexcept>
#include <variant>

#include "ub/random.hpp"

namespace ub {

using Complex = std::complex<double>;
using Vec2 = std::array<double, 2>;

struct Mat2 {
  double m00 = 0.0, m01 = 0.0;
  double m10 = 0.0, m11 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 scaled_identity(double s) { return {s, 0.0, 0.0, s}; }

  double det() const { return m00 * m11 - m01 * m10; }
  double trace() const { return m00 + m11; }
  Mat2 transpose() const { return {m00, m10, m01, m11}; }

  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.m00 - b.m00, a.m01 - b.m01, a.m10 - b.m10, a.m11 - b.m11};
  }
  friend Mat2 operator*(double s, const Mat2& a) {
    return {s * a.m00, s * a.m01, s * a.m10, s * a.m11};
  }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
  }
  friend Vec2 operator*(const Mat2& a, const Vec2& v) {
    return {a.m00 * v[0] + a.m01 * v[1], a.m10 * v[0] + a.m11 * v[1]};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateFusionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cofactor inverse; throws SingularMatrixError when |det| < 1e-300.
Mat2 inverse(const Mat2& m);

// Eigenvalues of a symmetric matrix, ascending.
Vec2 symmetric_eigenvalues(const Mat2& m);

inline Vec2 to_vec(Complex z) { return {z.real(), z.imag()}; }
inline Complex to_complex(const Vec2& v) { return {v[0], v[1]}; }

// Multiplication-by-z operator. Holds the rotation-scaling structure
// m00 == m11, m01 == -m10 by construction.
class RotScale2 {
 public:
  explicit RotScale2(Complex z) : z_(z) {}

  Mat2 matrix() const { return {z_.real(), -z_.imag(), z_.imag(), z_.real()}; }
  Complex value() const { return z_; }
  Vec2 operator*(const Vec2& w) const { return matrix() * w; }

 private:
  Complex z_;
};

// Throws std::invalid_argument for non-finite input.
RotScale2 to_matrix(Complex z);

struct Gaussian2 {
  Vec2 mean{0.0, 0.0};
  Mat2 cov{};

  static Gaussian2 isotropic(Vec2 mean, double variance_per_component) {
    return {mean, Mat2::scaled_identity(variance_per_component)};
  }
};

// Zero-mean circularly-symmetric Gaussian, described by the variance of one
// real component. |z|^2 is exponential with mean 2 * variance.
struct ZmcsGaussian {
  double variance_per_component = 0.0;

  Gaussian2 as_gaussian() const {
    return Gaussian2::isotropic({0.0, 0.0}, variance_per_component);
  }
};

// Likelihood that carries no information (infinite variance).
struct Uninformative {};

using Likelihood = std::variant<Gaussian2, Uninformative>;

Complex sample_zmcs(const ZmcsGaussian& dist, RandomStream& rng);

// Draws from N(mean, cov). Zero covariance returns the mean exactly.
Vec2 sample(const Gaussian2& g, RandomStream& rng);

// Product of two Gaussian densities, in information form.
Gaussian2 fuse(const Gaussian2& prior, const Likelihood& likelihood);

// Positive definite and symmetric (within 1e-12).
bool is_pds(const Mat2& m);

// Random PDS matrix G^T G + 1e-9 I, G uniform on [-1, 1].
Mat2 random_pds(RandomStream& rng);

// Random PDS D such that I - D is also PDS.
Mat2 random_contraction_pds(RandomStream& rng);

// Matrix predicates on 2x2 PDS matrices. Each returns true
// when the stated conclusion holds for the given D.
bool inverse_complement_is_pds(const Mat2& d);   // (I - D)^-1 - I  is PDS
bool resolvent_complement_is_pds(const Mat2& d); // I - (I + D)^-1  is PDS
bool complement_det_below_one(const Mat2& d);    // det(I - D) < 1

}  // namespace ub
