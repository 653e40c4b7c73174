#pragma once

// Minimal CSV helpers shared by the file readers/writers. Fields may be
// double-quoted; quotes inside quoted fields are doubled.

#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tourrec/error.hpp"

namespace tourrec::csv {

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Quotes a field only when it contains a separator, quote or newline.
std::string quote(std::string_view field);

std::string fixed6(double value);

/// Reads the next line, stripping a trailing '\r'. Returns false at EOF.
bool next_line(std::istream& in, std::string& line);

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  auto* first = text.data();
  auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

[[noreturn]] void malformed(std::string_view source, std::size_t line_no,
                            std::string_view detail);

}  // namespace tourrec::csv
