#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dln {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Strict parse of a whole field (surrounding blanks allowed); nan/inf and
// trailing garbage are rejected with a ParseError naming `line`.
double parse_double(std::string_view field, std::size_t line);

std::vector<double> split_doubles(std::string_view text, char sep, std::size_t line);
std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view s);

}  // namespace dln
