#pragma once

// Counter-keyed random streams. A stream is fully determined by a seed and a
// short tuple of integer keys, so draws do not depend on the order in which
// agents or threads consume them.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace agentcoord {

enum class StreamTag : std::uint64_t {
  kSample = 1,
  kInit = 2,
  kPopulation = 3,
  kTrace = 4,
  kSplit = 5,
  kData = 6,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// splitmix64 generator; satisfies UniformRandomBitGenerator.
class KeyedRng {
 public:
  using result_type = std::uint64_t;

  explicit KeyedRng(std::uint64_t state) noexcept : state_(state) {}

  KeyedRng(std::uint64_t seed, StreamTag tag,
           std::initializer_list<std::uint64_t> keys) noexcept
      : state_(mix64(seed ^ mix64(static_cast<std::uint64_t>(tag)))) {
    for (std::uint64_t k : keys) state_ = mix64(state_ ^ mix64(k + 0x632be59bd9b4e019ULL));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform index in [0, n). Requires n > 0.
  std::uint64_t index(std::uint64_t n) noexcept {
    // Lemire's multiply-shift; the bias is below 2^-64 * n.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace agentcoord
