#include "scamdyn/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <system_error>

#include <fmt/format.h>

#include "scamdyn/error.hpp"

namespace scamdyn::csv {

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string format_decimal(double x) {
  std::array<char, 512> buf{};
  auto [end, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed);
  if (ec != std::errc{}) return format_double(x);
  return std::string(buf.data(), end);
}

std::optional<double> parse_double(std::string_view field) {
  if (field.empty()) return std::nullopt;
  // from_chars rejects a leading '+', which hand-edited files sometimes carry.
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCategory::Config, "cannot open " + tmp.string());
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!os) throw Error(ErrorCategory::Config, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCategory::Config,
                "cannot rename " + tmp.string() + ": " + ec.message());
  }
}

}  // namespace scamdyn::csv
