#pragma once

#include <cmath>
#include <cstdint>

namespace nlosbound {

/// splitmix64 generator.
///
/// Update: `state += 0x9E3779B97F4A7C15`, output `mix(state)` where
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
/// Reals in [0,1) use the top 53 bits of one output: (next() >> 11) * 2^-53.
/// Any implementation following these three lines reproduces every draw.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t next() noexcept {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_positive() noexcept { return 1.0 - uniform(); }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Child seed for stream `stream` of `parent`:
/// mix(parent ^ mix(stream + gamma)). Used for per-trial and per-purpose sub-seeds.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
  return SplitMix64::mix(parent ^ SplitMix64::mix(stream + SplitMix64::kGamma));
}

/// Sub-stream tags under a scenario / trial seed.
enum class Stream : std::uint64_t {
  kAnchors = 1,
  kTarget = 2,
  kNoise = 3,
  kInits = 4,
  kOracle = 5,
};

constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream stream) noexcept {
  return derive_seed(parent, static_cast<std::uint64_t>(stream));
}

}  // namespace nlosbound
