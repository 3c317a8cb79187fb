#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace stochaction {

// Substream purposes. Each (seed, index, purpose) triple names an
// independent stream, so initial sampling and sign flips of trajectory i
// never share draws.
enum class StreamPurpose : std::uint64_t {
  initial_position = 1,
  sign_flip = 2,
  deviation = 3,
  factorization = 4,
  segment = 5,
  test = 99,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: output k is splitmix64(key + k * golden), which is
// the SplitMix64 sequence started from `key`. 16 bytes of state, so one
// stream per trajectory is affordable, and the bit sequence is identical on
// every platform. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream() = default;
  RngStream(std::uint64_t master_seed, std::uint64_t index, StreamPurpose purpose)
      : key_(splitmix64(splitmix64(master_seed ^ (static_cast<std::uint64_t>(purpose) << 56)) + index)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return splitmix64(key_ + (counter_ - 1) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on the open interval (0, 1); 53 random bits.
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace stochaction
