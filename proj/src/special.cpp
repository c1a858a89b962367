#include "ub/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ub {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// Power series, used for x < 1:
//   E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k * k!)
double e1_series(double x) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= -x / k;
    const double contrib = term / k;
    sum += contrib;
    if (std::abs(contrib) < kEps * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(x) - sum;
}

// Continued fraction for e^x E1(x), modified Lentz, used for x >= 1.
double e1_scaled_fraction(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double expint_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("expint_e1: argument must be positive");
  if (x < 1.0) return e1_series(x);
  return std::exp(-x) * e1_scaled_fraction(x);
}

double expint_e1_scaled(double x) {
  if (!(x > 0.0)) throw std::domain_error("expint_e1_scaled: argument must be positive");
  if (x < 1.0) return std::exp(x) * e1_series(x);
  return e1_scaled_fraction(x);
}

double log_bessel_i0(double x) {
  if (x < 0.0) x = -x;
  if (x < 30.0) {
    // I0(x) = sum_k (x^2/4)^k / (k!)^2
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < kMaxIter; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < kEps * sum) break;
    }
    return std::log(sum);
  }
  // Asymptotic: I0(x) ~ e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! 8^k x^k)
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (next > term) break;
    term = next;
    sum += term;
    if (term < kEps * sum) break;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

}  // namespace ub
