#pragma once

// Seeded random streams. Every Monte Carlo trial draws from its own engine
// derived from (seed, trial index), so results do not depend on how trials
// are split across workers.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ratelens/probcore.hpp"

namespace ratelens::rng {

// SplitMix64 output finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  std::uint64_t state_;
};

// xoshiro256** (Blackman & Vigna), a UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
};

// Independent engine for substream `stream` of `seed`.
inline Xoshiro256 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  return Xoshiro256(mix64(seed) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Xoshiro256& eng) noexcept {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw from cumulative weights (last entry = total).
std::size_t sample_index(std::span<const double> cumulative, double u) noexcept;

// Walker/Vose alias table: O(1) exact draws from a finite distribution
// supported on {offset, ..., offset + size - 1}.
class AliasTable {
 public:
  AliasTable() = default;
  AliasTable(std::span<const double> weights, std::int64_t offset = 0);

  std::int64_t operator()(Xoshiro256& eng) const noexcept {
    const double x = uniform01(eng) * static_cast<double>(prob_.size());
    auto i = static_cast<std::size_t>(x);
    if (i >= prob_.size()) i = prob_.size() - 1;
    const double frac = x - static_cast<double>(i);
    return offset_ + static_cast<std::int64_t>(frac < prob_[i] ? i : alias_[i]);
  }

  std::size_t size() const noexcept { return prob_.size(); }
  std::int64_t offset() const noexcept { return offset_; }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
  std::int64_t offset_ = 0;
};

// Binomial(n, p) pmf tabulated over its numerically relevant support (tails
// below 1e-18 of the mode are dropped), ready for alias sampling.
AliasTable binomial_table(std::int64_t n, double p);

// Multinomial sample of `n` events from a joint distribution, via conditional
// binomials over the cells in row-major order.
CountMatrix sample_counts(const JointDist& joint, std::uint64_t n,
                          std::uint64_t seed);

}  // namespace ratelens::rng
