#pragma once

#include <cstdio>
#include <string>

namespace ionlogic::detail {

/// Shortest-round-trip-safe rendering used by every CSV writer.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace ionlogic::detail
