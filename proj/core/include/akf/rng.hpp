// Copyright 2026 The akf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AKF_RNG_HPP_
#define AKF_RNG_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace akf {

/// Seeded pseudo-random source.
///
/// The core generator is xoshiro256** (Blackman & Vigna) with its state
/// expanded from the 64-bit seed by splitmix64. The integer stream and the
/// uniform/normal/exponential transforms are implemented here rather than
/// taken from <random>, whose distributions are not specified bit-exactly
/// across standard library implementations. Equal seeds therefore produce
/// identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for a named component, derived from a top-level seed.
  static Rng derive(std::uint64_t seed, std::string_view stream);
  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi);
  bool bernoulli(double p);

  /// Standard normal via the Marsaglia polar method.
  double normal();
  double normal(double mean, double stddev);

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate);

  /// Poisson count. Knuth's product method below mean 30, Hormann's PTRS
  /// transformed rejection above.
  std::uint64_t poisson(double mean);

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  std::optional<double> spare_normal_;
};

}  // namespace akf

#endif  // AKF_RNG_HPP_
