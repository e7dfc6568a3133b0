#pragma once

// Shortest round-trip formatting for doubles (report/CSV output must be
// reproducible byte for byte, so everything funnels through here).

#include <charconv>
#include <string>

namespace chebylab {

inline std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace chebylab
