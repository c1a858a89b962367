#pragma once

namespace ub {

// Exponential integral E1(x) = \int_x^\inf e^{-t}/t dt, x > 0.
double expint_e1(double x);

// e^x * E1(x), evaluated without forming e^x (stays finite for large x).
double expint_e1_scaled(double x);

// log(I0(x)) for x >= 0, I0 the modified Bessel function of order zero.
double log_bessel_i0(double x);

}  // namespace ub
