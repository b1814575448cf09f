#pragma once

#include <charconv>
#include <string>

namespace bittrunc::detail {

/// Shortest round-trip decimal form, the same digits nlohmann::json emits.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace bittrunc::detail
