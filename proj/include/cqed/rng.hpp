#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "cqed/constants.hpp"

// Counter-based deterministic random numbers (splitmix64 finalizer over a
// keyed counter). Every output column of an experiment gets its own stream,
// so adding a column never perturbs the others and a fixed seed gives
// byte-identical files.

namespace cqed {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream * 0x9E3779B97F4A7C15ULL + 0x243F6A8885A308D3ULL))) {}

  CounterRng(std::uint64_t seed, const std::string& stream_name)
      : CounterRng(seed, fnv1a(stream_name)) {}

  // Uniform in [0, 1).
  double uniform() {
    const std::uint64_t bits = mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_);
    return double(bits >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(constants::two_pi * u2);
    have_spare_ = true;
    return radius * std::cos(constants::two_pi * u2);
  }

  static std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
      hash ^= c;
      hash *= 0x100000001B3ULL;
    }
    return hash;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cqed
