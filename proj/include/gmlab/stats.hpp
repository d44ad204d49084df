#pragma once

#include <cstddef>
#include <span>

namespace gmlab {

/// P(Z > z) for a standard normal Z, accurate far into the tail.
double normal_sf(double z);

/// Half-width of the Wilson score interval for k successes out of n.
double wilson_halfwidth(std::size_t successes, std::size_t n, double z = 1.959963984540054);

struct MeanEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
};

/// Sample mean, unbiased variance and standard error, summed in index order.
MeanEstimate mean_estimate(std::span<const double> samples);

}  // namespace gmlab
