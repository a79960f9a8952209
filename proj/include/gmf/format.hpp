#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "gmf/errors.hpp"

namespace gmf {

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

/// Parses a complete field as a double; errors carry the 1-based line number.
inline double parse_double(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
    field.remove_prefix(1);
  }
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (field.empty()) {
    throw IngestError(line_no, "empty field");
  }
  if (field.front() == '+') {
    field.remove_prefix(1);
  }
  double value = 0.0;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc() || result.ptr != field.data() + field.size()) {
    throw IngestError(line_no, "cannot parse number '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace gmf
