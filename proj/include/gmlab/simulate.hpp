#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gmlab/control.hpp"
#include "gmlab/model.hpp"
#include "gmlab/rng.hpp"
#include "gmlab/spectral.hpp"

namespace gmlab {

enum class Splitting {
  /// xi then u, both from start-of-step values.
  Lie,
  /// Half u step, full xi step with the mid value of mean(u^alpha), half u step.
  Strang,
};

/// Everything a coupled run needs. Which system is integrated follows from
/// what is present: noise only (stochastic system), control only (skeleton),
/// both (controlled stochastic system).
struct SimSpec {
  ModelParams params;
  Grid grid{64, 1, 1.0};
  Field v0;
  double dt = 1e-3;
  double horizon = 1.0;
  std::optional<CameronMartinControl> control;
  /// Must have a step dividing dt and reach the horizon. Required when sigma > 0.
  std::optional<BrownianPath> noise;
  std::size_t save_every = 1;
  double blowup_threshold = 1e8;
  /// Exponent of the recorded martingale int xi^{-delta} dB; default_delta() if unset.
  std::optional<double> delta;
  Splitting splitting = Splitting::Lie;
  Spectrum spectrum = Spectrum::Continuum;
};

/// Midpoint of the admissible energy-estimate interval
/// ((p-1)/alpha, min(q/(1+beta), 2/(d+2))), or nullopt when it is empty.
std::optional<double> default_rho(const ModelParams& params);

/// min(0.5, (q - rho - rho beta) / (2 rho)) with rho = default_rho, else 0.5.
double default_delta(const ModelParams& params);

/// Throws InvalidSpec describing the first inconsistency.
void validate_spec(const SimSpec& spec);

/// Number of steps of size dt covering the horizon.
std::size_t step_count(const SimSpec& spec);

/// Lie-split (or Strang) integration with the exact inhibitor propagator and the
/// exponential-Euler activator step. Halts with blowup_time set once ‖u‖_∞ crosses
/// the threshold.
Trajectory simulate(const SimSpec& spec);

struct PicardResult {
  Trajectory trajectory;
  /// Sup distance between successive iterates, one entry per iteration.
  std::vector<double> distances;
  std::size_t iterations = 0;
};

/// Fixed point of the mild-form map on the step grid of `spec`: trapezoidal
/// quadrature against exact semigroup factors for u and against the geometric
/// factor R(t-s) for xi. Throws NoConvergence when max_iter is reached.
PicardResult picard_solve(const SimSpec& spec, double tol = 1e-10, std::size_t max_iter = 50);

/// Local-existence horizon min(T1, T2, 1) with
/// T1 = e^{-3q/2 - Nq} zeta^q M^{-p}, T2 = e^{-3beta/2 - N beta - 2N} M^{-alpha}.
/// Requires M > 2 + v_sup + e^N zeta.
double local_existence_horizon(double N, double M, double v_sup, const ModelParams& params);

/// sup over shared saved times of ‖u_a - u_b‖_∞ + |xi_a - xi_b|.
double sup_distance(const Trajectory& a, const Trajectory& b);

struct BlowupEvent {
  double time = 0.0;
  double sup_norm = 0.0;
};

/// First time ‖u‖_∞ crossed the trajectory's threshold, if it did.
std::optional<BlowupEvent> detect_blowup(const Trajectory& traj);

/// CSV: t,xi,ubar_alpha,u_min,u_max,u_l2 (one row per step, 17 significant digits).
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

/// Flat binary: uint64 n, uint64 dim, uint64 count, then count frames of
/// n^dim float64 values, row-major, little-endian.
void write_field_snapshots(const Trajectory& traj, std::ostream& out);

struct Snapshots {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<std::vector<double>> frames;
};

Snapshots read_field_snapshots(std::istream& in);

}  // namespace gmlab
