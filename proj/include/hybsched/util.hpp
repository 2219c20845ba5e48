#pragma once

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace hybsched::util {

// Shortest decimal form that round-trips a double exactly.
inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

inline std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

// Splits on a single delimiter, keeping empty fields.
inline std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    while (true) {
        const auto pos = s.find(delim, begin);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(begin));
            break;
        }
        out.emplace_back(s.substr(begin, pos - begin));
        begin = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view raw, const std::string& context) {
    const std::string_view s = trim(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw std::runtime_error(context + ": expected a number, got '" + std::string(raw) + "'");
    return value;
}

inline long long parse_int(std::string_view raw, const std::string& context) {
    const std::string_view s = trim(raw);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw std::runtime_error(context + ": expected an integer, got '" + std::string(raw) + "'");
    return value;
}

}  // namespace hybsched::util
