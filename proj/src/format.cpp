#include "hjlab/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace hjlab {

std::string format_shortest(double v) {
    if (v == 0.0) return "0"; // normalize -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

} // namespace hjlab
