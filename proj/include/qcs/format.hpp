#pragma once

#include <cstdio>
#include <string>

namespace qcs {

/// 17 significant digits: enough for an exact binary64 round trip.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace qcs
