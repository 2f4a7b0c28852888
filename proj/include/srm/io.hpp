#pragma once

/**
 * @file
 * @brief Round-trip number formatting and small CSV helpers.
 */

#include <charconv>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "srm/errors.hpp"

namespace srm::io {

/// 17 significant digits: parses back to the same double.
inline std::string fmt(double x)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return {buf, res.ptr};
}

/// Fixed notation with `decimals` digits after the point.
inline std::string fmt_fixed(double x, int decimals)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, decimals);
  return {buf, res.ptr};
}

inline std::string join(std::span<const std::string> items, std::string_view sep = ",")
{
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) { out += sep; }
    out += items[i];
  }
  return out;
}

inline std::string join(std::span<const double> values, std::string_view sep = ",")
{
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) { out += sep; }
    out += fmt(values[i]);
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep = ',')
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) { break; }
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) { return {}; }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Strict parse of a complete token; InvalidArgument otherwise.
inline double parse_double(std::string_view s)
{
  s = trim(s);
  double v       = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw InvalidArgument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<double> parse_list(std::string_view s)
{
  std::vector<double> out;
  if (trim(s).empty()) { return out; }
  for (const auto & tok : split(s, ',')) { out.push_back(parse_double(tok)); }
  return out;
}

/// I/O failures; the message carries the path.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw IoError("cannot read '" + path + "'"); }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string & path, std::string_view content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) { throw IoError("cannot write '" + path + "'"); }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) { throw IoError("write failed for '" + path + "'"); }
}

}  // namespace srm::io
