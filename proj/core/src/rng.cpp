#include "mledr/rng.hpp"

namespace mledr {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter c, Key k) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  // counter word 0 is the block index; words 1..3 carry the stream identity.
  // Stream id a is folded into 32 bits (sample sizes and cell ids stay far below 2^32).
  counter_ = {0u, static_cast<std::uint32_t>(a ^ (a >> 32)), static_cast<std::uint32_t>(b),
              static_cast<std::uint32_t>(b >> 32)};
}

void RandomStream::refill() noexcept {
  buffer_ = Philox4x32::block(counter_, key_);
  ++counter_[0];
  used_ = 0;
}

RandomStream::result_type RandomStream::operator()() noexcept {
  if (used_ >= 4) refill();
  const std::uint64_t lo = buffer_[used_];
  const std::uint64_t hi = buffer_[used_ + 1];
  used_ += 2;
  return (hi << 32) | lo;
}

}  // namespace mledr
