#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dwmrpm::data {

// Minimal helpers for the unquoted comma-separated formats used by this project.

std::vector<std::string_view> split_fields(std::string_view line);
std::string_view trim(std::string_view s);
std::optional<double> parse_double(std::string_view s);
std::optional<int> parse_int(std::string_view s);

/// Shortest representation that parses back to the identical double.
std::string format_double(double value);

}  // namespace dwmrpm::data
