#include "gmlab/stats.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "gmlab/errors.hpp"
#include "gmlab/parallel.hpp"

namespace gmlab {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double wilson_halfwidth(std::size_t successes, std::size_t n, double z) {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  return z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
}

MeanEstimate mean_estimate(std::span<const double> samples) {
  MeanEstimate out;
  const std::size_t n = samples.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double s : samples) sum += s;
  out.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - out.mean) * (s - out.mean);
    out.variance = ss / static_cast<double>(n - 1);
    out.std_error = std::sqrt(out.variance / static_cast<double>(n));
  }
  return out;
}

std::size_t resolve_threads(std::optional<std::size_t> requested) {
  if (requested) {
    if (*requested == 0) throw InvalidParameter("threads", "must be >= 1");
    return *requested;
  }
  if (const char* env = std::getenv("GM_LAB_THREADS"); env && *env) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 1)
      throw InvalidParameter("GM_LAB_THREADS", std::string("not a positive integer: ") + env);
    return static_cast<std::size_t>(value);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace gmlab
