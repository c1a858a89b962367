#include <doctest.h>

#include <cmath>
#include <set>

#include "ub/random.hpp"

using ub::Philox4x32;
using ub::RandomStream;

TEST_CASE("philox4x32-10 known-answer vectors") {
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0xffffffff, 0xffffffff}) ==
        Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}) ==
        Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
    CHECK(va != d.next_u64());
    seen.insert(va);
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("uniform ranges") {
  RandomStream rng(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const double v = rng.uniform_pos();
    CHECK((v > 0.0 && v <= 1.0));
  }
}

TEST_CASE("variate moments") {
  constexpr int kSamples = 1000000;
  RandomStream rng(5, 1);
  double se = 0.0, sn = 0.0, sn2 = 0.0, su = 0.0;
  for (int i = 0; i < kSamples; ++i) {
    se += rng.exponential(2.0);
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    su += rng.uniform();
  }
  // Exponential(mean 2) has sd 2; normal variance estimate has sd sqrt(2/n).
  CHECK(std::abs(se / kSamples - 2.0) < 4.0 * 2.0 / std::sqrt(kSamples));
  CHECK(std::abs(sn / kSamples) < 4.0 / std::sqrt(kSamples));
  CHECK(std::abs(sn2 / kSamples - 1.0) < 4.0 * std::sqrt(2.0 / kSamples));
  CHECK(std::abs(su / kSamples - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / kSamples));
}
