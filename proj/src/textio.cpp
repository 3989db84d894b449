#include "dln/textio.hpp"

#include "dln/errors.hpp"

#include <charconv>
#include <cmath>

namespace dln {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view field, std::size_t line) {
  const std::string_view f = trim(field);
  double v = 0.0;
  const char* begin = f.data();
  if (!f.empty() && f.front() == '+') ++begin;
  const auto res = std::from_chars(begin, f.data() + f.size(), v);
  if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
    throw ParseError("non-numeric field '" + std::string(f) + "'", line);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<double> split_doubles(std::string_view text, char sep, std::size_t line) {
  std::vector<double> out;
  for (std::string_view f : split(text, sep)) out.push_back(parse_double(f, line));
  return out;
}

}  // namespace dln
