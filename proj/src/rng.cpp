#include "evac/rng.hpp"

namespace evac::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t product = std::uint64_t{a} * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

Key key_from_seed(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

}  // namespace

Block philox4x32_10(Block ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(mix64(seed) ^ (tag + 0x632BE59BD9B4E019ull + (seed << 6) + (seed >> 2)));
}

CounterRng::CounterRng(std::uint64_t seed, Stream stream) noexcept
    : key_(key_from_seed(seed)), stream_(stream) {}

SequentialEngine::SequentialEngine(std::uint64_t seed, Stream stream, std::uint32_t substream) noexcept
    : key_(key_from_seed(seed)), stream_(static_cast<std::uint32_t>(stream)), substream_(substream) {}

SequentialEngine::result_type SequentialEngine::operator()() noexcept {
  if (used_ >= 4) {
    buffer_ = philox4x32_10({stream_, substream_, static_cast<std::uint32_t>(counter_),
                             static_cast<std::uint32_t>(counter_ >> 32)},
                            key_);
    ++counter_;
    used_ = 0;
  }
  const std::uint64_t value = join(buffer_[used_], buffer_[used_ + 1]);
  used_ += 2;
  return value;
}

std::uint64_t SequentialEngine::below(std::uint64_t n) noexcept {
  // Lemire's multiply-and-reject; unbiased.
  std::uint64_t x = (*this)();
  auto m = static_cast<u128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<u128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double SequentialEngine::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

}  // namespace evac::rng
