#include "phcs/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "phcs/error.hpp"

namespace phcs {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

bool parse_number(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (auto field : split(text, ',')) {
        double v;
        if (!parse_number(field, v)) throw ConfigError("not a number: '" + std::string(trim(field)) + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace phcs
