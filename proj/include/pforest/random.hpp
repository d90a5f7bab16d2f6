#pragma once

#include <cstdint>

namespace pforest {

/// Counter-based random stream.
///
/// A stream is identified by a 64-bit key obtained by hashing the master seed
/// together with a derivation path (e.g. tree index, node index, candidate
/// index). Draws are a pure function of (key, draw counter), so two streams
/// with the same seed and path produce the same sequence no matter which
/// thread owns them or in which order siblings are derived.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  // Child stream for `index`; does not advance this stream.
  [[nodiscard]] RandomStream derive(std::uint64_t index) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform01();

  // Uniform on [lo, hi).
  double uniform_real(double lo, double hi);

  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t draws() const { return counter_; }

 private:
  RandomStream(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace pforest
