#pragma once

#include <cstdio>
#include <string>

namespace heatlab {

/// Full round-trip decimal rendering of a double (17 significant digits).
inline std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace heatlab
