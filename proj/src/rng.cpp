#include "gmlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "gmlab/errors.hpp"
#include "gmlab/parallel.hpp"
#include "gmlab/stats.hpp"

namespace gmlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

void fill_sup_abs(BrownianPath& path) {
  path.sup_abs.resize(path.values.size());
  double running = 0.0;
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    running = std::max(running, std::abs(path.values[k]));
    path.sup_abs[k] = running;
  }
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ (index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

NormalStream::NormalStream(std::uint64_t seed) : engine_(seeded_engine(seed)) {}

BrownianPath sample_brownian(std::size_t n_steps, double horizon, std::uint64_t seed) {
  if (n_steps < 1) throw InvalidParameter("n_steps", "must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidParameter("horizon", "must be > 0");
  BrownianPath path;
  path.dt = horizon / static_cast<double>(n_steps);
  path.seed = seed;
  path.values.resize(n_steps + 1);
  const double scale = std::sqrt(path.dt);
  NormalStream normal(seed);
  path.values[0] = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) path.values[k + 1] = path.values[k] + scale * normal();
  fill_sup_abs(path);
  return path;
}

BrownianPath path_from_values(double dt, std::vector<double> values, std::uint64_t seed) {
  if (!(dt > 0.0)) throw InvalidParameter("dt", "must be > 0");
  if (values.size() < 2) throw InvalidParameter("values", "need at least one step");
  if (values.front() != 0.0) throw InvalidParameter("values", "path must start at 0");
  BrownianPath path;
  path.dt = dt;
  path.seed = seed;
  path.values = std::move(values);
  fill_sup_abs(path);
  return path;
}

BrownianPath refine_bridge(const BrownianPath& path, std::uint64_t seed) {
  const std::size_t n = path.steps();
  BrownianPath fine;
  fine.dt = 0.5 * path.dt;
  fine.seed = seed;
  fine.values.resize(2 * n + 1);
  const double sd = std::sqrt(0.25 * path.dt);
  NormalStream normal(seed);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = path.values[k];
    const double b = path.values[k + 1];
    fine.values[2 * k] = a;
    fine.values[2 * k + 1] = 0.5 * (a + b) + sd * normal();
  }
  fine.values[2 * n] = path.values[n];
  fill_sup_abs(fine);
  return fine;
}

BrownianPath coarsen(const BrownianPath& path, std::size_t stride) {
  if (stride == 0 || path.steps() % stride != 0)
    throw InvalidParameter("stride", "must divide the number of steps");
  BrownianPath coarse;
  coarse.dt = path.dt * static_cast<double>(stride);
  coarse.seed = path.seed;
  for (std::size_t k = 0; k < path.values.size(); k += stride) coarse.values.push_back(path.values[k]);
  fill_sup_abs(coarse);
  return coarse;
}

void write_path_csv(const BrownianPath& path, std::ostream& out) {
  out << "t,value\n";
  char buf[64];
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", path.dt * static_cast<double>(k), path.values[k]);
    out << buf;
  }
}

double sup_density_bound_tail(double x, double t) {
  return 8.0 * normal_sf(x / (2.0 * std::sqrt(t)));
}

TailReport sup_tail_check(std::size_t n_paths, double horizon, std::span<const double> x_grid,
                          std::uint64_t seed, std::size_t n_steps, std::size_t threads) {
  if (n_paths == 0) throw InvalidParameter("n_paths", "must be >= 1");
  if (!(horizon > 0.0)) throw InvalidParameter("horizon", "must be > 0");
  for (double x : x_grid)
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidParameter("x_grid", "entries must be >= 0");

  std::vector<double> sups(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    sups[i] = sample_brownian(n_steps, horizon, stream_seed(seed, i)).sup_abs.back();
  });

  TailReport report;
  report.horizon = horizon;
  report.n_paths = n_paths;
  report.n_steps = n_steps;
  report.pass = true;
  const double n = static_cast<double>(n_paths);
  for (double x : x_grid) {
    TailRow row;
    row.x = x;
    const auto hits = std::count_if(sups.begin(), sups.end(), [x](double s) { return s > x; });
    row.empirical_tail = static_cast<double>(hits) / n;
    row.bound = sup_density_bound_tail(x, horizon);
    row.tail_estimate = 4.0 * normal_sf(x / (2.0 * std::sqrt(horizon)));
    row.std_error = std::sqrt(row.empirical_tail * (1.0 - row.empirical_tail) / n);
    row.pass = row.empirical_tail <= row.bound + 3.0 * row.std_error;
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace gmlab
