// SPDX-License-Identifier: Apache-2.0

// Locale-independent number formatting shared by the on-disk formats.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nnlft::text {

/// 17 significant digits: enough for an exact double round trip.
std::string format_double(double value);

/// Strict parse of the whole field; returns false on any trailing garbage.
bool parse_double(std::string_view field, double& out);
bool parse_uint(std::string_view field, std::uint64_t& out);
bool parse_int(std::string_view field, std::int64_t& out);

std::vector<std::string_view> split_fields(std::string_view line, char delimiter);

std::string_view trim(std::string_view text);

}  // namespace nnlft::text
