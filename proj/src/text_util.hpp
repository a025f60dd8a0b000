#pragma once

// Internal helpers shared by the line-based file formats.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "poscop/error.hpp"

namespace poscop::detail {

inline std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Unsigned decimal in [0,1]; a negative digit budget disables the
// fraction-length check.
double parse_decimal_value(std::string_view token, std::size_t line, int max_fraction_digits);

// Visits `text` line by line with 1-based numbering, comments ('#' to end of
// line) removed and surrounding whitespace stripped; skips blank lines.
template <class Fn>
void for_each_content_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    const bool last = end == text.size();
    start = end + 1;
    ++line_no;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = strip(line);
    if (!line.empty()) fn(line, line_no);
    if (last) break;
  }
}

}  // namespace poscop::detail
