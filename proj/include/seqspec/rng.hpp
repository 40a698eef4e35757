#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace seqspec {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A 64-bit seed
/// is the key; the 128-bit counter carries (stream id, position), so every
/// (seed, stream) pair is an independent, randomly addressable sequence.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Mixes several integers into one 64-bit stream id (splitmix64 finalizer).
inline std::uint64_t mix_stream(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                                std::uint64_t d = 0) {
  auto fmix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  std::uint64_t h = fmix(a);
  h = fmix(h ^ b);
  h = fmix(h ^ c);
  return fmix(h ^ d);
}

/// Standard normal draws from stream `stream` of generator `seed`.
/// Box-Muller on 53-bit uniforms, so output is identical on every platform
/// with a correctly rounded libm.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const Philox4x32::Block ctr = {static_cast<std::uint32_t>(position_),
                                   static_cast<std::uint32_t>(position_ >> 32),
                                   static_cast<std::uint32_t>(stream_),
                                   static_cast<std::uint32_t>(stream_ >> 32)};
    ++position_;
    const auto out = Philox4x32::generate(ctr, key_);
    const std::uint64_t a = (std::uint64_t{out[0]} << 32) | out[1];
    const std::uint64_t b = (std::uint64_t{out[2]} << 32) | out[3];
    // u1 in (0, 1] keeps log finite; u2 in [0, 1).
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename It>
  void fill(It first, It last) {
    for (; first != last; ++first) *first = (*this)();
  }

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace seqspec
