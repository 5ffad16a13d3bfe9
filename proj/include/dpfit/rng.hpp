#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace dpfit {

// Counter-based generator: the n-th output is a pure function of (key, n), so
// a stream can be derived for any (seed, trial) pair without touching other
// streams. The mixing function is the SplitMix64 finalizer.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed) ^ mix(stream + kStreamSalt))) {}

  // Child stream, independent of the parent's position.
  Rng split(std::uint64_t child) const {
    Rng r(0);
    r.key_ = mix(key_ ^ mix(child * kGolden + kSplitSalt));
    return r;
  }

  result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
  static constexpr std::uint64_t kSplitSalt = 0x8CB92BA72F3D8DD7ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dpfit
