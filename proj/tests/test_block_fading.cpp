#include <doctest.h>

#include <cmath>

#include "ub/block_fading.hpp"

using namespace ub;

TEST_CASE("derive_grid") {
  const OfdmConfig g = derive_grid(5e6, 5.3e-3, 2e-7);
  CHECK(g.subcarriers == 26500);
  CHECK(g.spacing_hz == doctest::Approx(1.89e2).epsilon(5e-3));

  const OfdmConfig unit = derive_grid(1.0, 1.0, 0.0);
  CHECK(unit.subcarriers == 1);
  CHECK(unit.spacing_hz == 1.0);

  try {
    derive_grid(5e6, 1.0001e-3, 0.0);
    FAIL("expected a grid error");
  } catch (const GridError& e) {
    CHECK(e.field() == "block_length");
  }
  try {
    derive_grid(5e6, 1e-3, 1.01e-7);
    FAIL("expected a grid error");
  } catch (const GridError& e) {
    CHECK(e.field() == "cyclic_prefix");
  }
  try {
    derive_grid(0.0, 1e-3, 0.0);
    FAIL("expected a grid error");
  } catch (const GridError& e) {
    CHECK(e.field() == "bandwidth");
  }
}

TEST_CASE("truncation_energy") {
  CHECK(truncation_energy(1.7e-8, 0.0) == 1.0);
  CHECK(truncation_energy(17.2e-9, 200e-9) == doctest::Approx(8.91e-6).epsilon(1e-3));
  CHECK(truncation_energy(1.7e-8, 2e-7) == doctest::Approx(7.774e-6).epsilon(1e-3));
  CHECK_THROWS(truncation_energy(0.0, 1.0));

  // General profile: one minus the fraction retained by truncation.
  const auto taps = PowerDelayProfile::tabulated({0.0, 1e-8, 2e-8, 3e-8, 4e-8}, {0.0, 4.0, 0.0, 1.0, 0.0});
  CHECK(truncation_energy(taps, 2e-8) == doctest::Approx(0.2).epsilon(1e-14));
  const auto e = PowerDelayProfile::exponential(1.7e-8);
  CHECK(truncation_energy(e, 2e-7) == doctest::Approx(truncation_energy(1.7e-8, 2e-7)).epsilon(1e-6));
}

TEST_CASE("adjust_snr") {
  CHECK(adjust_snr(0.018, 0.99, 8.91e-6) == doctest::Approx(0.0178).epsilon(5e-3));
  for (double s : {0.0, 1e-3, 0.018, 7.0, 1e9}) CHECK(adjust_snr(s, 1.0, 0.0) == s);

  const double eta = 0.99, e = 8.91e-6;
  const double kept = eta * (1.0 - e);
  CHECK(adjust_snr(1e9, eta, e) == doctest::Approx(kept / (1.0 - kept)).epsilon(1e-6));

  CHECK_THROWS(adjust_snr(-1.0, 0.99, 0.0));
  CHECK_THROWS(adjust_snr(1.0, 0.0, 0.0));
  CHECK_THROWS(adjust_snr(1.0, 1.1, 0.0));
  CHECK_THROWS(adjust_snr(1.0, 0.9, 1.0));

  const SnrBudget b{0.018, 0.99, 8.91e-6};
  CHECK(b.snr_adjusted() == adjust_snr(0.018, 0.99, 8.91e-6));
  CHECK(b.snr_adjusted() <= b.snr_raw);
}

TEST_CASE("adjust_snr monotonicity over a grid") {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      for (int k = 0; k < 10; ++k) {
        const double snr = 1e-3 * std::pow(10.0, 0.5 * i);
        const double eta = 0.5 + 0.05 * j;
        const double e = 0.09 * k;
        const double base = adjust_snr(snr, eta, e);
        CHECK(adjust_snr(snr * 1.1, eta, e) > base);
        CHECK(adjust_snr(snr, eta + 0.01, e) > base);
        CHECK(adjust_snr(snr, eta, e + 0.01) < base);
        CHECK(base <= snr);
      }
    }
  }
}

TEST_CASE("cp_penalty") {
  CHECK(cp_penalty(0.7, 5.3e-3, 0.0) == 0.7);
  CHECK(cp_penalty(0.0, 5.3e-3, 2e-7) == 0.0);
  CHECK(1.0 - cp_penalty(1.0, 5.3e-3, 2e-7) == doctest::Approx(3.77e-5).epsilon(1e-3));
  for (double tt : {0.0, 1e-9, 1e-3, 1.0, 1e3}) {
    const double m = cp_penalty(1.0, 5.3e-3, tt);
    CHECK(m > 0.0);
    CHECK(m <= 1.0);
  }
  CHECK_THROWS(cp_penalty(-1.0, 1.0, 0.0));
}
