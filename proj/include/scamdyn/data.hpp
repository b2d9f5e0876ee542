#pragma once

// Monthly report series.
//
// CSV contract (input and export): header `month,province,reports`, month as
// YYYY-MM, province any non-empty token without commas, reports a
// nonnegative decimal. UTF-8, LF line endings.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scamdyn/inference.hpp"
#include "scamdyn/integrators.hpp"
#include "scamdyn/model.hpp"

namespace scamdyn {

struct YearMonth {
  int year = 2021;
  int month = 1;  // 1..12

  YearMonth next() const;
  /// Signed number of months from *this to `later`.
  int months_until(const YearMonth& later) const;
  std::string to_string() const;
  /// Strict `YYYY-MM`; throws InvalidArgument otherwise.
  static YearMonth parse(std::string_view text);

  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

struct ReportSeries {
  std::vector<YearMonth> months;  // contiguous, increasing
  std::vector<double> counts;     // >= 0
  std::string label;

  std::size_t size() const { return counts.size(); }
  void validate() const;
};

/// One series per province, ordered by province name. `scale` multiplies
/// every count.
std::vector<ReportSeries> parse_reports(std::istream& is, double scale = 1.0);
std::vector<ReportSeries> load_reports(const std::filesystem::path& path,
                                       double scale = 1.0);

void write_reports(std::ostream& os, std::span<const ReportSeries> series);

/// Monthwise sum labelled "pooled". The result does not depend on the order
/// of `series`.
ReportSeries pool(std::span<const ReportSeries> series);

struct SyntheticSpec {
  Parameters true_params = Parameters::posterior_means();
  State init{1000.0, 100.0, 0.0, 200.0, 0.0};
  std::size_t months = 51;
  double noise_sd = 0.0;
  std::uint64_t seed = 42;
  Observable observable = Observable::Prevalence;
  YearMonth start{2021, 1};
  std::string label = "synthetic";

  void validate() const;
};

/// Samples the observable on the monthly grid at NSFD step kLikelihoodStep
/// and adds N(0, noise_sd^2) noise, truncated at zero.
ReportSeries generate_synthetic(const SyntheticSpec& spec);

/// Month k of the series sits at t = k * kDaysPerMonth.
ObservationSet to_observations(const ReportSeries& series, Observable observable);

}  // namespace scamdyn
