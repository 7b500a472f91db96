#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace phcs {

/// Decimal rendering with 12 significant digits ("%.12g"); infinities print
/// as "inf" / "-inf" and NaN as "nan". Every CSV the toolkit writes uses it.
std::string format_number(double x);

/// Parses a decimal number occupying the whole field (surrounding blanks
/// allowed). Returns false instead of throwing.
bool parse_number(std::string_view text, double& out);

/// Comma-separated list of numbers, e.g. "0,1,2.5".
std::vector<double> parse_number_list(std::string_view text);

std::string_view trim(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);

} // namespace phcs
