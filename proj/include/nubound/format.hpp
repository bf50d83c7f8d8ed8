#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace nubound {

/// Shortest text that is exact for the value: 17 significant digits, "inf" for +infinity.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace nubound
