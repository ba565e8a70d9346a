#pragma once

// Counter-based random numbers.
//
// Every random draw in the simulator is a pure function of
// (master seed, stream id, counter words). Nothing carries hidden state
// between agents or timesteps, so results do not depend on iteration order
// or on how work is split across threads.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace evac::rng {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;
__extension__ using u128 = unsigned __int128;

// Philox4x32 with 10 rounds (Salmon et al., Random123).
Block philox4x32_10(Block counter, Key key) noexcept;

// Purpose tags for independent streams under one seed.
enum class Stream : std::uint32_t {
  Initialization = 1,
  TieShuffle = 2,
  Imitation = 3,
  GraphConstruction = 4,
};

// SplitMix64 finalizer; used to fold tags into a seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Order-sensitive combination of a seed with one more tag.
std::uint64_t combine(std::uint64_t seed, std::uint64_t tag) noexcept;

// Uniform double in [0, 1) built from 53 bits of (hi, lo).
inline double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

// Maps 64 random bits onto [0, n). Bias is at most n / 2^64.
inline std::uint64_t scale(std::uint64_t bits, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<u128>(bits) * n) >> 64);
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) noexcept {
  return (std::uint64_t{hi} << 32) | lo;
}

// Random access into one stream: draw(a, b, c) is a fixed function of its
// arguments for a given (seed, stream).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream) noexcept;

  Block draw(std::uint32_t a, std::uint32_t b, std::uint32_t c = 0) const noexcept {
    return philox4x32_10({static_cast<std::uint32_t>(stream_), a, b, c}, key_);
  }

 private:
  Key key_;
  Stream stream_;
};

// Sequential 64-bit generator walking the counter space of one stream.
// Satisfies UniformRandomBitGenerator, but callers use the helpers below
// rather than <random> distributions, whose output is implementation defined.
class SequentialEngine {
 public:
  using result_type = std::uint64_t;

  SequentialEngine(std::uint64_t seed, Stream stream, std::uint32_t substream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  // Uniform double in [0, 1).
  double uniform() noexcept;

 private:
  Key key_;
  std::uint32_t stream_;
  std::uint32_t substream_;
  std::uint64_t counter_ = 0;
  Block buffer_{};
  int used_ = 4;
};

// Fisher-Yates shuffle with a portable index sequence.
template <typename T>
void shuffle(std::span<T> items, SequentialEngine& engine) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(engine.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace evac::rng
