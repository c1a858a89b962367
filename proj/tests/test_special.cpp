#include <doctest.h>

#include <cmath>

#include "ub/quadrature.hpp"
#include "ub/special.hpp"

// libstdc++ truncates its own asymptotic expansion beyond x ~ 100, so the
// comparison stops there; larger x is checked against the series below.
TEST_CASE("E1 matches the standard library exponential integral") {
  for (double lx = -8.0; lx <= 2.0; lx += 0.05) {
    const double x = std::pow(10.0, lx);
    const double ref = -std::expint(-x);
    CAPTURE(x);
    CHECK(ub::expint_e1(x) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(ub::expint_e1_scaled(x) == doctest::Approx(std::exp(x) * ref).epsilon(1e-12));
  }
}

TEST_CASE("scaled E1 stays finite far beyond exp overflow") {
  for (double x : {150.0, 600.0, 1e3, 1e5, 1e9}) {
    // Asymptotic series e^x E1(x) ~ (1/x) sum_k (-1)^k k! / x^k.
    double term = 1.0, ref = 0.0;
    for (int k = 0; k < 12; ++k) {
      ref += term;
      term *= -(k + 1) / x;
    }
    ref /= x;
    CAPTURE(x);
    CHECK(ub::expint_e1_scaled(x) == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("log I0 matches the standard library Bessel function") {
  CHECK(ub::log_bessel_i0(0.0) == 0.0);
  for (double x = 1e-3; x < 650.0; x *= 1.3) {
    CAPTURE(x);
    CHECK(ub::log_bessel_i0(x) == doctest::Approx(std::log(std::cyl_bessel_i(0.0, x))).epsilon(1e-12));
  }
  // I0(x) ~ e^x / sqrt(2 pi x) (1 + 1/(8x)).
  const double x = 1e6;
  CHECK(ub::log_bessel_i0(x) ==
        doctest::Approx(x - 0.5 * std::log(2.0 * M_PI * x) + std::log1p(1.0 / (8.0 * x))).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre is exact for polynomials of degree 2n-1") {
  for (int order : {1, 2, 5, 10, 20}) {
    const auto rule = ub::gauss_legendre(order);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(order));
    for (int k = 0; k <= 2 * order - 1; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CAPTURE(order);
      CAPTURE(k);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("composite rule integrates smooth functions") {
  const auto rule = ub::composite_gauss_legendre(0.0, 3.0, 8, 10);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::exp(-rule.nodes[i]) * std::cos(rule.nodes[i]);
  // \int_0^3 e^-t cos t dt = [e^-t (sin t - cos t)]/2 from 0 to 3.
  const double exact = (std::exp(-3.0) * (std::sin(3.0) - std::cos(3.0)) + 1.0) / 2.0;
  CHECK(sum == doctest::Approx(exact).epsilon(1e-14));
}
