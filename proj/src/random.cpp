#include "pforest/random.hpp"

#include "pforest/errors.hpp"

namespace pforest {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSeedSalt = 0x5851F42D4C957F2DULL;
constexpr std::uint64_t kChildSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

RandomStream::RandomStream(std::uint64_t seed) : key_(mix64(seed ^ kSeedSalt)) {}

RandomStream RandomStream::derive(std::uint64_t index) const {
  const std::uint64_t child = mix64((index + 1) * kChildSalt);
  return RandomStream(mix64(key_ ^ child) + kGamma, 0);
}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double RandomStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

__extension__ using u128 = unsigned __int128;

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw UsageError("uniform_index: empty range");
  // Lemire's multiply-shift with rejection of the biased low region.
  u128 m = static_cast<u128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace pforest
