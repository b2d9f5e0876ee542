#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "scamdyn/integrators.hpp"
#include "scamdyn/model.hpp"

namespace scamdyn {

/// Normalized sensitivity indices (dR0/dp)(p/R0) of the reproduction number.
/// N cancels out of every index.
struct LocalIndexSet {
  double beta = 0.0;
  double psi = 0.0;
  double gamma = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
  double delta = 0.0;
};

LocalIndexSet local_indices(const Parameters& params);

struct ParameterRange {
  ParamId id = ParamId::Beta;
  double low = 0.0;
  double high = 1.0;
};

/// Sampling ranges of the published global sweep, in its row order
/// (beta, gamma, sigma, delta, mu, lambda, psi).
std::vector<ParameterRange> default_global_ranges();

/// Latin hypercube design: column j holds one uniform draw from each of the
/// n equal-width strata of ranges[j], in random order.
struct SampleDesign {
  std::size_t n = 0;
  std::vector<ParameterRange> ranges;
  std::uint64_t seed = 0;
  Eigen::MatrixXd matrix;  // n x ranges.size()
};

SampleDesign lhs_sample(std::size_t n, std::vector<ParameterRange> ranges,
                        std::uint64_t seed);

/// Time integrals of active scammers and victims over [0, horizon].
struct Burden {
  double scammers = 0.0;
  double victims = 0.0;
};

/// Trapezoidal rule over the stored points; a horizon between grid points is
/// closed with a linearly interpolated end value.
Burden integrate_burden(const Trajectory& traj, double horizon);

enum class BurdenOutput { AsBurden, VBurden };

std::string_view to_string(BurdenOutput o);

struct PrccEntry {
  ParamId id = ParamId::Beta;
  double coefficient = 0.0;
  double p_value = 1.0;
  bool significant = false;  // p < 0.05
};

struct PrccReport {
  BurdenOutput output = BurdenOutput::AsBurden;
  std::vector<PrccEntry> entries;  // in design column order
  std::size_t n = 0;
  std::size_t degrees_of_freedom = 0;

  const PrccEntry& operator[](ParamId id) const;
};

inline constexpr double kSignificanceLevel = 0.05;

/// Partial rank correlation of each design column with `outputs`, controlling
/// for the remaining columns by least squares on ranks (with intercept).
/// Two-sided p-values use Student-t with n - 2 - (k - 1) degrees of freedom.
PrccReport prcc(const SampleDesign& design, std::span<const double> outputs,
                BurdenOutput label);

struct GlobalConfig {
  std::size_t n = 2500;
  std::vector<ParameterRange> ranges = default_global_ranges();
  Parameters fixed = Parameters::posterior_means();  // for unsampled rates
  State init{1000.0, 100.0, 0.0, 200.0, 0.0};
  double horizon = 1520.0;
  double h = 1.0;
  std::uint64_t seed = 7;
  unsigned threads = 0;  // 0: hardware concurrency
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct GlobalReport {
  SampleDesign design;
  PrccReport scammers;  // AsBurden
  PrccReport victims;   // VBurden
  std::size_t dropped_rows = 0;
};

GlobalReport global_analysis(const GlobalConfig& cfg);

/// `parameter,description,nominal_value,sensitivity_index`
void write_local_indices_csv(std::ostream& os, const Parameters& nominal,
                             const LocalIndexSet& indices);

/// `parameter,range_low,range_high,prcc_As,p_As,prcc_V,p_V,significant_As,significant_V`
void write_prcc_csv(std::ostream& os, const GlobalReport& report);

}  // namespace scamdyn
