#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gmlab/control.hpp"
#include "gmlab/simulate.hpp"

namespace gmlab {

enum class Observable { TerminalXi, TerminalUMean, SupXi, InfXi };
enum class Direction { AtLeast, AtMost };

/// {observable >= threshold} or {observable <= threshold}.
struct EventSpec {
  Observable observable = Observable::TerminalXi;
  double threshold = 1.0;
  Direction direction = Direction::AtLeast;
};

/// "terminal-xi", "terminal-u-mean", "sup-xi", "inf-xi". Throws InvalidParameter.
Observable parse_observable(std::string_view name);
std::string to_string(Observable obs);
/// ">=" / "ge" or "<=" / "le".
Direction parse_direction(std::string_view text);
std::string to_string(Direction dir);

double observe(const Trajectory& traj, Observable obs);

/// Signed distance to the event: <= 0 inside it, > 0 by how much it is missed.
double event_gap(const EventSpec& event, const Trajectory& traj);
inline bool event_holds(const EventSpec& event, const Trajectory& traj) {
  return event_gap(event, traj) <= 0.0;
}

/// 1/2 ‖h‖_H^2 = 1/2 sum hdot_i^2 dt_h.
double rate_functional(const CameronMartinControl& h);

struct MinimizeOptions {
  std::size_t m_intervals = 64;
  double mu0 = 10.0;
  double mu_factor = 10.0;
  std::size_t stages = 6;
  std::size_t max_iter_per_stage = 200;
  /// Forward-difference step, relative to max(1, |z_i|).
  double fd_step = 1e-4;
  double grad_tol = 1e-9;
  /// Final gap at most this (times max(1, |threshold|)) counts as feasible.
  double feasibility_tol = 1e-4;
  /// Final gap above this (times max(1, |threshold|)) means the event was not reached.
  double infeasible_tol = 1e-2;
  std::size_t threads = 1;
  /// Starting hdot (length m_intervals); zero control otherwise.
  std::optional<std::vector<double>> initial_hdot;
};

enum class RateStatus { Converged, NotConverged, Infeasible };
std::string to_string(RateStatus status);

struct TraceRow {
  std::size_t stage = 0;
  std::size_t iteration = 0;
  double mu = 0.0;
  double objective = 0.0;
  double rate = 0.0;
  double gap = 0.0;
  double grad_norm = 0.0;
};

struct RateResult {
  CameronMartinControl h_star;
  /// 1/2 ‖h_star‖_H^2, or +inf when the event was never reached.
  double I_star = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  RateStatus status = RateStatus::NotConverged;
  double final_gap = 0.0;
  std::vector<TraceRow> trace;
};

/// Cheapest piecewise-constant control steering the skeleton (spec with sigma = 0)
/// into the event: penalty continuation on 1/2 ‖h‖^2 + mu max(0, gap)^2, each stage
/// solved by BFGS with forward-difference gradients of the gap.
RateResult minimize_rate(const EventSpec& event, const SimSpec& spec,
                         const MinimizeOptions& opts = {});

enum class SamplingMethod { Plain, Tilted };
std::string to_string(SamplingMethod method);

struct LadderRow {
  double epsilon = 0.0;
  double p_hat = 0.0;
  double ci_halfwidth = 0.0;
  /// -epsilon log p_hat (+inf when p_hat == 0).
  double neg_eps_log_p = 0.0;
  SamplingMethod method = SamplingMethod::Plain;
  double I_star = 0.0;
  std::size_t n_samples = 0;
};

/// Monte Carlo estimate of P(event) for the system with sigma = sqrt(epsilon).
/// Plain: fraction of hits with a Wilson 95% interval. Tilted: the drift
/// hdot/sqrt(epsilon) is added to the noise (the run is driven by W and the control
/// `tilt`) and each hit is weighted by
///   exp(-(1/sqrt eps) int hdot dW - ‖h‖_H^2 / (2 eps));
/// the interval is 1.96 empirical standard errors. Sample i uses stream_seed(seed, i).
LadderRow mc_tail_probability(const EventSpec& event, const SimSpec& spec, double epsilon,
                              std::size_t n_samples, std::uint64_t seed,
                              const std::optional<CameronMartinControl>& tilt = std::nullopt,
                              std::size_t threads = 1);

struct LadderResult {
  std::vector<LadderRow> rows;
  RateResult rate;
  /// neg_eps_log_p strictly decreasing along the rows.
  bool monotone = false;
};

/// One mc_tail_probability row per epsilon (strictly decreasing list), tilted by the
/// minimizer when exp(-I*/epsilon) < 1e-3, plain otherwise.
LadderResult ldp_ladder(const EventSpec& event, const SimSpec& spec,
                        const std::vector<double>& eps_list, std::size_t n_samples,
                        std::uint64_t seed, const MinimizeOptions& opts = {},
                        std::size_t threads = 1);

struct WeakRow {
  std::size_t n = 0;
  /// sup_t (‖u_{g_n} - u_0‖_∞ + |xi_{g_n} - xi_0|).
  double distance = 0.0;
  double norm_h = 0.0;
};

/// Skeleton runs under hdot_n(t) = sin(2 pi n t) (one control cell per step, exact
/// h at every node) against the uncontrolled run.
std::vector<WeakRow> weak_convergence_experiment(const SimSpec& spec,
                                                 const std::vector<std::size_t>& n_list);

/// epsilon,p_hat,ci,neg_eps_log_p,method,I_star
void write_ladder_csv(const std::vector<LadderRow>& rows, std::ostream& out);
/// stage,iteration,mu,objective,rate,gap,grad_norm
void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& out);
/// n,distance,norm_h
void write_weak_csv(const std::vector<WeakRow>& rows, std::ostream& out);

}  // namespace gmlab
