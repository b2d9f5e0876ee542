#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scamdyn::csv {

/// 17 significant digits; parses back to the identical double.
std::string format_double(double x);

/// Shortest fixed-notation decimal that round-trips.
std::string format_decimal(double x);

/// Whole-field parse; nullopt on trailing garbage or empty input.
std::optional<double> parse_double(std::string_view field);

/// Splits on ',' without quoting support. A trailing '\r' is not stripped.
std::vector<std::string_view> split(std::string_view line);

/// Writes to a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace scamdyn::csv
