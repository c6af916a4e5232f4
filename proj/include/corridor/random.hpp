// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace corridor {

/// SplitMix64 finalizer; used to derive well-mixed seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// xoshiro256** stream with the variate generators the simulator needs.
///
/// Satisfies UniformRandomBitGenerator. Every Monte Carlo trial owns its own
/// stream obtained from `for_trial(master, index)`, so results do not depend
/// on how trials are split across workers.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) noexcept;

  /// Substream for trial `index` of a run seeded with `master`.
  static RandomStream for_trial(std::uint64_t master, std::uint64_t index) noexcept {
    return RandomStream(splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() noexcept;
  double exponential() noexcept;
  /// Gamma(shape, scale = 1), Marsaglia-Tsang.
  double gamma(double shape) noexcept;
  std::uint64_t poisson(double mean) noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace corridor
