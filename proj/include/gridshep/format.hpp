#pragma once

#include <cstdio>
#include <string>

namespace gridshep::detail {

/// Shortest-faithful decimal form: 17 significant digits round-trip binary64
/// exactly, which the raster and CSV writers rely on.
inline std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Three decimals, for human-readable summaries.
inline std::string format_fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace gridshep::detail
