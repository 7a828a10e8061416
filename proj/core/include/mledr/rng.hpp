#pragma once

// Counter-based random streams. A stream is identified by (seed, a, b) and is
// independent of every other stream; no state is shared between streams, so
// replications can be distributed over any number of workers.

#include <array>
#include <cstdint>
#include <limits>

namespace mledr {

/// Philox4x32 with 10 rounds (Salmon et al. counter-based generator).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

/// A keyed random stream producing 64-bit words; satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  void refill() noexcept;

  Philox4x32::Key key_{};
  Philox4x32::Counter counter_{};
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

/// The stream for replication `replication` of the cell with sample size `n`.
inline RandomStream replication_stream(std::uint64_t masterSeed, std::uint64_t n,
                                       std::uint64_t replication) noexcept {
  return RandomStream(masterSeed, n, replication);
}

}  // namespace mledr
