#pragma once

#include <span>

namespace baycount {

/// Quantile with linear interpolation between order statistics
/// (position prob * (n - 1) in the sorted sample).
double empirical_quantile(std::span<const double> values, double prob);

double sample_mean(std::span<const double> values);

/// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> values);

}  // namespace baycount
