#pragma once

#include <span>
#include <vector>

namespace scamdyn::stats {

double mean(std::span<const double> xs);

/// Linear interpolation between order statistics: with sorted x_1..x_n,
/// position h = (n - 1) p + 1 and q = x_floor(h) + (h - floor(h)) (x_ceil(h) - x_floor(h)).
double quantile(std::span<const double> xs, double p);

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace scamdyn::stats
