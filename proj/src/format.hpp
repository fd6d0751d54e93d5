#pragma once

#include <charconv>
#include <string>

namespace isw::detail {

// Shortest decimal representation that parses back to the same double.
inline std::string shortest(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace isw::detail
