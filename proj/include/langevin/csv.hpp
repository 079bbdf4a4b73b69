#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace langevin {

/// Shortest decimal text that parses back to exactly `value`.
/// Non-finite values have no CSV representation and come back empty.
inline std::string format_double(double value) {
  if (!std::isfinite(value)) return {};
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  if (res.ec != std::errc{}) return {};
  return std::string(buf, res.ptr);
}

}  // namespace langevin
