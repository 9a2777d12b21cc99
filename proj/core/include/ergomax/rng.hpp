#pragma once

#include <cstdint>
#include <limits>

namespace ergomax {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive an independent stream key from a base seed and a stream id.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

/// Counter-based generator: the k-th output is mix64(key + (k+1)*gamma), so
/// any position of the stream can be computed without touching the others.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return at(counter_++); }

  constexpr result_type at(std::uint64_t counter) const {
    return mix64(key_ + (counter + 1) * kGamma);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return to_unit((*this)()); }
  /// Uniform on the open interval (0, 1).
  constexpr double uniform_open() { return to_open_unit((*this)()); }

  constexpr std::uint64_t counter() const { return counter_; }
  constexpr std::uint64_t key() const { return key_; }

  static constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }
  static constexpr double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace ergomax
