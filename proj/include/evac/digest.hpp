#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace evac {

// FNV-1a (64-bit) over a canonical byte sequence. Used to fingerprint
// configurations and result rows, not for security.
class Digest {
 public:
  Digest& bytes(const void* data, std::size_t size) noexcept;
  Digest& text(std::string_view s) noexcept;
  Digest& u64(std::uint64_t v) noexcept;
  // Exact bit pattern; -0.0 and 0.0 are folded together.
  Digest& real(double v) noexcept;

  std::uint64_t value() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string to_hex(std::uint64_t value);
std::uint64_t from_hex(std::string_view text);

}  // namespace evac
