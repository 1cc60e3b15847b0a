#pragma once

#include <cstdio>
#include <string>

namespace fluxlim::csv {

// Shortest round-trippable decimal form; keeps CSV output byte-deterministic.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string num(long v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%ld", v);
    return buf;
}

} // namespace fluxlim::csv
