#pragma once

#include <charconv>
#include <string>

namespace evac {

// Shortest text that reads back to the same double. Plain decimal notation
// unless the magnitude is tiny or huge.
inline std::string format_real(double value) {
  if (value == 0.0) value = 0.0;
  const double mag = value < 0 ? -value : value;
  const auto fmt = (mag == 0.0 || (mag >= 1e-6 && mag < 1e15)) ? std::chars_format::fixed : std::chars_format::general;
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, fmt);
  return {buf, end};
}

inline std::string format_fixed(double value, int digits) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
  std::string out(buf, end);
  if (out.starts_with('-') && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

}  // namespace evac
