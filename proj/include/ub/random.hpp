#pragma once

#include <array>
#include <cstdint>

namespace ub {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Stateless: the output block is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

// A stream of random variates. Streams with distinct (seed, stream_id) are
// statistically independent; the draw sequence depends only on those two
// values, so per-trial streams can be generated on any worker.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform on (0, 1].
  double uniform_pos();
  // Exponential with the given mean.
  double exponential(double mean);
  // Standard normal (Box-Muller, second variate cached).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  int next_word_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace ub
