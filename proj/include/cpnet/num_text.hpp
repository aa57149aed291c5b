#pragma once

// Decimal text for doubles: shortest form that parses back bit-for-bit.

#include <charconv>
#include <string>
#include <system_error>

#include "cpnet/errors.hpp"

namespace cpnet {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("not a number: \"" + s + "\"");
    return v;
}

} // namespace cpnet
