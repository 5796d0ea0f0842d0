// SPDX-License-Identifier: Apache-2.0

#include "nnlft/text_format.hpp"

#include <charconv>
#include <system_error>

namespace nnlft::text {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto result = std::from_chars(field.data(), field.data() + field.size(), out);
  return result.ec == std::errc{} && result.ptr == field.data() + field.size();
}

bool parse_uint(std::string_view field, std::uint64_t& out) {
  field = trim(field);
  if (field.empty()) return false;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), out);
  return result.ec == std::errc{} && result.ptr == field.data() + field.size();
}

bool parse_int(std::string_view field, std::int64_t& out) {
  field = trim(field);
  if (field.empty()) return false;
  const auto result = std::from_chars(field.data(), field.data() + field.size(), out);
  return result.ec == std::errc{} && result.ptr == field.data() + field.size();
}

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view blanks = " \t\r\n";
  const auto first = text.find_first_not_of(blanks);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(blanks);
  return text.substr(first, last - first + 1);
}

}  // namespace nnlft::text
