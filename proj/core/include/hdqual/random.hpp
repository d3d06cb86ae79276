#pragma once

// Portable seeded randomness.
//
// Everything random in hdqual flows from xoshiro256** seeded through
// SplitMix64. The standard <random> distributions are avoided on purpose:
// their algorithms are implementation-defined, so the same seed would give
// different bases on libstdc++ and libc++.
//
// Streams: a root seed is split into independent per-subsystem seeds with
// derive_seed(root, "name"). Names in use:
//   "basis"   encoder basis matrix
//   "phase"   encoder phase offsets
//   "shuffle" per-epoch HDC sample order
//   "balance" class downsampling
//   "split"   train/test assignment
//   "mlp"     baseline init and minibatch order
//   "synth"   synthetic noise and deviations

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

namespace hdqual {

/// SplitMix64 step; advances `state` and returns the next output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Independent seed for a named stream of `root`.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) noexcept {
  std::uint64_t s = root ^ fnv1a64(stream);
  splitmix64(s);
  return splitmix64(s);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer on [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via the Marsaglia polar method.
  double normal() noexcept;

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Fisher-Yates shuffle driven by Rng::below, identical on every platform.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace hdqual
