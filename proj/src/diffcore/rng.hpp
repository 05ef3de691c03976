/* Copyright 2026 The gcgat Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gcgat::diff {

// Counter-based random stream: draw i of seed s is a pure function of (s, i),
// so a stream can be reconstructed anywhere from its two integers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t NextU64() noexcept { return Hash(seed_, counter_++); }

  // Uniform on the open interval (0, 1).
  double Uniform() noexcept {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * Uniform();
  }

  // Integer in [0, n).
  std::uint64_t Below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(Uniform() * static_cast<double>(n)) %
           (n == 0 ? 1 : n);
  }

  bool Bernoulli(double p) noexcept { return Uniform() < p; }

  // Box-Muller; consumes two draws.
  double Normal() noexcept {
    const double u1 = Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double Gumbel() noexcept { return -std::log(-std::log(Uniform())); }

  // Child seed derived from a parent seed and a label (step, scene index...).
  static std::uint64_t Derive(std::uint64_t seed, std::uint64_t label) noexcept {
    return Hash(seed ^ 0xd1b54a32d192ed03ULL, label);
  }

  static std::uint64_t Hash(std::uint64_t seed, std::uint64_t counter) noexcept {
    // splitmix64 evaluated at position `counter` of the stream seeded by `seed`
    std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace gcgat::diff
