#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace mim {

// Locale-independent double formatting via std::to_chars.

// Shortest representation that round-trips; used for CSV and JSON payloads.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

// Fixed significant digits; used for human-facing printouts.
inline std::string format_double(double value, int significant_digits) {
    char buf[48];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value,
                                   std::chars_format::general, significant_digits);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string format_int(std::int64_t value) {
    char buf[24];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace mim
