#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace gmlab {

/// Seed of stream `index` under `master`. Pure function of its arguments, so an
/// ensemble member always sees the same noise whatever worker runs it.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Standard normal deviates from a seeded 64-bit Mersenne twister.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed);
  double operator()() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Uniform-step Brownian path on [0, n*dt] with values[0] = 0.
struct BrownianPath {
  double dt = 0.0;
  std::vector<double> values;
  /// sup_abs[k] = max_{j<=k} |values[j]|.
  std::vector<double> sup_abs;
  std::uint64_t seed = 0;

  std::size_t steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  double horizon() const noexcept { return dt * static_cast<double>(steps()); }
  double increment(std::size_t k) const { return values[k + 1] - values[k]; }
};

BrownianPath sample_brownian(std::size_t n_steps, double horizon, std::uint64_t seed);

/// Builds a path from given values (values[0] must be 0); fills sup_abs.
BrownianPath path_from_values(double dt, std::vector<double> values, std::uint64_t seed = 0);

/// Halves the step. Coarse values are copied verbatim; each new midpoint is drawn
/// from the Brownian-bridge law N((a+b)/2, dt/4) between its neighbours.
BrownianPath refine_bridge(const BrownianPath& path, std::uint64_t seed);

/// Keeps every `stride`-th value (inverse of repeated refinement).
BrownianPath coarsen(const BrownianPath& path, std::size_t stride);

void write_path_csv(const BrownianPath& path, std::ostream& out);

struct TailRow {
  double x = 0.0;
  double empirical_tail = 0.0;
  /// Integral over (x, inf) of the density bound 4/sqrt(2 pi t) exp(-y^2/(8t)).
  double bound = 0.0;
  /// Two-sided reflection estimate 4 * P(N(0,1) > x / (2 sqrt t)).
  double tail_estimate = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

struct TailReport {
  double horizon = 1.0;
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::vector<TailRow> rows;
  bool pass = false;
};

/// Integral of the running-sup density bound from x to infinity: 8 P(N(0,1) > x/(2 sqrt t)).
double sup_density_bound_tail(double x, double t);

/// Empirical P(B*_t > x) over n_paths discretised paths against the density bound;
/// a row passes iff empirical <= bound + 3 binomial standard errors.
TailReport sup_tail_check(std::size_t n_paths, double horizon, std::span<const double> x_grid,
                          std::uint64_t seed, std::size_t n_steps = 1000, std::size_t threads = 1);

}  // namespace gmlab
