#pragma once

#include <span>
#include <vector>

namespace dimc {

double mean(std::span<const double> xs);
// Unbiased sample variance.
double variance(std::span<const double> xs);
// Standard error of the mean of an autocorrelated series by non-overlapping
// batch means (defaults to floor(sqrt(n)) batches).
double batch_means_se(std::span<const double> xs, std::size_t batches = 0);
// Linear-interpolation quantile, q in [0, 1].
double quantile(std::vector<double> xs, double q);
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace dimc
