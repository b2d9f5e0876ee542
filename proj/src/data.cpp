#include "scamdyn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "scamdyn/csv.hpp"
#include "scamdyn/error.hpp"

namespace scamdyn {

YearMonth YearMonth::next() const {
  return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
}

int YearMonth::months_until(const YearMonth& later) const {
  return (later.year - year) * 12 + (later.month - month);
}

std::string YearMonth::to_string() const { return fmt::format("{:04d}-{:02d}", year, month); }

YearMonth YearMonth::parse(std::string_view text) {
  const auto bad = [&] { return InvalidArgument(fmt::format("bad month '{}'", text)); };
  if (text.size() != 7 || text[4] != '-') throw bad();
  int parts[2] = {0, 0};
  std::size_t pos = 0;
  for (int p = 0; p < 2; ++p) {
    const std::size_t len = p == 0 ? 4 : 2;
    for (std::size_t i = 0; i < len; ++i, ++pos) {
      const char c = text[pos];
      if (c < '0' || c > '9') throw bad();
      parts[p] = parts[p] * 10 + (c - '0');
    }
    ++pos;  // skip '-'
  }
  if (parts[1] < 1 || parts[1] > 12) throw bad();
  return YearMonth{parts[0], parts[1]};
}

void ReportSeries::validate() const {
  if (months.size() != counts.size()) throw InvalidArgument("months and counts differ in length");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(counts[i] >= 0.0) || !std::isfinite(counts[i])) {
      throw InvalidArgument("report counts must be finite and >= 0");
    }
    if (i > 0 && months[i - 1].next() != months[i]) {
      throw GapError(months[i - 1].next().to_string());
    }
  }
}

std::vector<ReportSeries> parse_reports(std::istream& is, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("scale must be > 0");
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, "empty file");
  if (line != "month,province,reports") {
    throw ParseError(1, "expected header 'month,province,reports'");
  }

  std::map<std::string, std::map<YearMonth, double>> by_province;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.back() == '\r') throw ParseError(lineno, "CRLF line ending");
    const auto fields = csv::split(line);
    if (fields.size() != 3) throw ParseError(lineno, "expected 3 fields");
    YearMonth month;
    try {
      month = YearMonth::parse(fields[0]);
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
    if (fields[1].empty()) throw ParseError(lineno, "empty province");
    const auto value = csv::parse_double(fields[2]);
    if (!value || !(*value >= 0.0) || !std::isfinite(*value)) {
      throw ParseError(lineno, fmt::format("reports must be a nonnegative number, got '{}'",
                                           fields[2]));
    }
    auto& series = by_province[std::string(fields[1])];
    if (!series.emplace(month, *value * scale).second) {
      throw DuplicateError(month.to_string(), std::string(fields[1]));
    }
  }

  std::vector<ReportSeries> out;
  for (auto& [province, rows] : by_province) {
    ReportSeries s;
    s.label = province;
    for (const auto& [month, count] : rows) {
      if (!s.months.empty() && s.months.back().next() != month) {
        throw GapError(s.months.back().next().to_string());
      }
      s.months.push_back(month);
      s.counts.push_back(count);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ReportSeries> load_reports(const std::filesystem::path& path, double scale) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCategory::Data, "cannot open " + path.string());
  return parse_reports(is, scale);
}

void write_reports(std::ostream& os, std::span<const ReportSeries> series) {
  os << "month,province,reports\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      os << s.months[i].to_string() << ',' << s.label << ','
         << csv::format_decimal(s.counts[i]) << '\n';
    }
  }
}

ReportSeries pool(std::span<const ReportSeries> series) {
  if (series.empty()) throw InvalidArgument("nothing to pool");
  for (const auto& s : series) {
    if (s.months != series.front().months) {
      throw GridMismatch(fmt::format("series '{}' and '{}' cover different months",
                                     series.front().label, s.label));
    }
  }
  ReportSeries out;
  out.label = "pooled";
  out.months = series.front().months;
  std::vector<double> addends(series.size());
  for (std::size_t i = 0; i < out.months.size(); ++i) {
    for (std::size_t j = 0; j < series.size(); ++j) addends[j] = series[j].counts[i];
    // Fixed summation order keeps the result independent of input order.
    std::sort(addends.begin(), addends.end());
    double sum = 0.0;
    for (double a : addends) sum += a;
    out.counts.push_back(sum);
  }
  return out;
}

void SyntheticSpec::validate() const {
  if (months < 2) throw InvalidArgument("synthetic series needs at least 2 months");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw InvalidArgument("noise_sd must be >= 0");
  true_params.validate();
  init.validate();
}

ReportSeries generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<double> times(spec.months);
  for (std::size_t k = 0; k < spec.months; ++k) times[k] = static_cast<double>(k) * kDaysPerMonth;
  std::vector<double> values =
      observe(spec.init, spec.true_params, times, spec.observable, kLikelihoodStep);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  ReportSeries out;
  out.label = spec.label;
  YearMonth month = spec.start;
  for (std::size_t k = 0; k < spec.months; ++k) {
    double y = values[k];
    if (spec.noise_sd > 0.0) y = std::max(0.0, y + spec.noise_sd * noise(rng));
    out.months.push_back(month);
    out.counts.push_back(y);
    month = month.next();
  }
  return out;
}

ObservationSet to_observations(const ReportSeries& series, Observable observable) {
  ObservationSet obs;
  obs.observable = observable;
  obs.values = series.counts;
  obs.times.resize(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    obs.times[k] = static_cast<double>(k) * kDaysPerMonth;
  }
  return obs;
}

}  // namespace scamdyn
