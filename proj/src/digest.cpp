#include "evac/digest.hpp"

#include <bit>
#include <charconv>
#include <cstring>

#include "evac/error.hpp"

namespace evac {

Digest& Digest::bytes(const void* data, std::size_t size) noexcept {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state_ ^= p[i];
    state_ *= 0x100000001b3ull;
  }
  return *this;
}

Digest& Digest::text(std::string_view s) noexcept {
  u64(s.size());
  return bytes(s.data(), s.size());
}

Digest& Digest::u64(std::uint64_t v) noexcept {
  unsigned char le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>(v >> (8 * i));
  return bytes(le, sizeof le);
}

Digest& Digest::real(double v) noexcept {
  if (v == 0.0) v = 0.0;
  return u64(std::bit_cast<std::uint64_t>(v));
}

std::string Digest::hex() const { return to_hex(state_); }

std::string to_hex(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::uint64_t from_hex(std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("malformed hex digest '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace evac
