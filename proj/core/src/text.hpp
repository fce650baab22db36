#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "tlasso/errors.hpp"

namespace tlasso::text {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view s, ErrorCode code, std::string_view what) {
  s = trim(s);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) {
    fail(code, "cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return value;
}

template <typename Int>
Int parse_int(std::string_view s, ErrorCode code, std::string_view what) {
  s = trim(s);
  Int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) {
    fail(code, "cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return value;
}

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace tlasso::text
