#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace fairmix {

// SplitMix64 generator. Satisfies UniformRandomBitGenerator; split() derives an
// independent stream, so every experiment cell can own its generator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;
  SplitMix64 split() noexcept;

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform_open() noexcept;

 private:
  std::uint64_t state_;
};

// Standard normal deviates by the Box-Muller transform. Fixed algorithm so draws
// are identical across standard libraries.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) noexcept : rng_(seed) {}

  double operator()() noexcept;
  double uniform_open() noexcept { return rng_.uniform_open(); }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

// Order-sensitive hash of a list of words into one 64-bit seed.
std::uint64_t hash_seed(std::initializer_list<std::uint64_t> words) noexcept;

// Bit pattern of a double, with -0.0 folded onto +0.0.
std::uint64_t seed_word(double value) noexcept;

}  // namespace fairmix
