#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gmlab/control.hpp"
#include "gmlab/model.hpp"
#include "gmlab/rng.hpp"
#include "gmlab/simulate.hpp"

namespace gmlab {

/// One inequality "lhs <= rhs" evaluated on one path, at its tightest point.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  /// rhs - lhs.
  double margin = 0.0;
  double tolerance = 0.0;
  /// margin >= -tolerance.
  bool pass = true;
  std::size_t path_id = 0;
  /// Time where the margin is smallest (0 for integral bounds).
  double time = 0.0;
  /// false for diagnostics with unspecified constants (never gate on these).
  bool hard = true;
};

BoundReport make_report(std::string name, double lhs, double rhs, double tolerance,
                        std::size_t path_id, double time = 0.0);

/// Inhibitor bounds along a stochastic run driven by `path`:
///   xi_lower:     xi(t) >= zeta exp(-(1 + sigma^2/2) t + sigma B_t + h_t)
///   xi_lower_inf: xi(t) >= zeta exp(-(1 + sigma^2/2) t - sigma B*_t - h*_t)
///   eta_upper:    xi^{1+beta}(t) <= e^{(1+beta)(sigma B*_t + h*_t)} zeta^{1+beta}
///                   + (1+beta) e^{(1+beta)(2 sigma B*_t + osc h)} int_0^t mean(u^alpha)
/// with the integral as the left-endpoint sum of mean(u^alpha) dt, which dominates the
/// integrator's per-step forcing weights. All three hold exactly for the scheme, so the
/// tolerance is rel_tol relative.
/// Throws MismatchedPath when the path does not drive this trajectory.
std::vector<BoundReport> check_xi_bounds(const Trajectory& traj, const BrownianPath& path,
                                         const ModelParams& params, std::size_t path_id = 0,
                                         double rel_tol = 1e-10);

/// Trapezoidal int_0^1 mean(u^alpha) / xi^{1+beta+delta} against
///   Lambda = delta^{-1} zeta^{-delta} + ((3+delta)/2) e^{3 delta/2 + delta B*_1} zeta^{-delta}
///            + sup_t |M_delta(t)|,
/// M_delta recomputed from the run with the requested delta. Tolerance quad_c * dt * max(1, lhs).
/// Throws WrongNormalization unless sigma == 1.
BoundReport check_integral_bound(const Trajectory& traj, const BrownianPath& path, double delta,
                                 std::size_t path_id = 0, double quad_c = 1.0);

/// Lambda above for any sigma:
///   delta^{-1} zeta^{-delta} + ((2 + sigma^2 + delta sigma^2)/2) e^{delta(1+sigma^2/2) + delta sigma B*_1} zeta^{-delta}
///   + sigma sup|M_delta|.
double integral_bound_rhs(double delta, double zeta, double sigma, double b_star, double m_abs_sup);

/// Derived exponents of the energy estimate for a (rho, ell, delta) choice.
struct EnergyConstraints {
  double rho = 0.0;
  double ell = 0.0;
  double delta = 0.0;
  double theta = 0.0;
  double gamma = 0.0;
  /// rho / (1 - gamma theta).
  double holder_exponent = 0.0;
};

/// Validates rho < q/(1+beta), (p-1)/alpha < rho < 2/(d+2), theta and gamma in (0,1),
/// rho/(1 - gamma theta) < 1 and delta in (0, (q - rho - rho beta)/rho).
/// Throws ConstraintViolation naming the first failed condition.
EnergyConstraints energy_constraints(const ModelParams& params, double ell, double rho,
                                     double delta);

/// lhs = sup_{t<=1} mean(u^ell) over saved frames; rhs = the energy estimate with C = 1:
///   max(1, ‖v‖^{(1-theta gamma) ell/(1-theta)} + Theta^{(1-theta gamma)/(1-theta)} Lambda^{rho/(1-theta)}).
/// Theta and Lambda use the sigma-general forms. Reported with hard = false; read lhs / rhs.
BoundReport check_energy_diagnostic(const Trajectory& traj, const BrownianPath& path, double ell,
                                    double rho, double delta, const ModelParams& params,
                                    std::size_t path_id = 0);

/// Skeleton-run bounds under `control`:
///   skeleton_xi_lower:   xi_h(t) >= e^{-t - ‖h‖_H} zeta
///   skeleton_integral:   int_0^1 mean(u^alpha)/xi_h^{1+beta+delta} <= delta^{-1} zeta^{-delta}
///                          + e^{delta(1+‖h‖_H)} zeta^{-delta} (1 + ‖h‖_H)
///   modulus_sqrt:        |h(t) - h(s)| <= ‖h‖_H sqrt(t - s)
///   modulus_norm:        |h(t) - h(s)| <= ‖h‖_H
/// Throws MismatchedControl if the run was not driven by `control`.
std::vector<BoundReport> check_skeleton_bounds(const Trajectory& traj,
                                               const CameronMartinControl& control, double delta,
                                               std::size_t path_id = 0, double quad_c = 1.0,
                                               double rel_tol = 1e-10);

struct BoundSummary {
  std::string name;
  std::size_t n_paths = 0;
  std::size_t n_pass = 0;
  double worst_margin = 0.0;
  double dt = 0.0;
  bool hard = true;
};

/// Groups reports by name in order of first appearance.
std::vector<BoundSummary> summarize(const std::vector<BoundReport>& reports, double dt);

/// name,n_paths,n_pass,worst_margin,dt
void write_summary_csv(const std::vector<BoundSummary>& rows, std::ostream& out);

/// name,path_id,lhs,rhs,margin,tolerance,pass,time
void write_reports_csv(const std::vector<BoundReport>& reports, std::ostream& out);

struct EnsembleOptions {
  std::size_t n_paths = 100;
  std::uint64_t master_seed = 1;
  std::size_t threads = 1;
  /// Noise steps per simulation step (finer paths leave the coupling unchanged).
  std::size_t noise_substeps = 1;
  double delta = 0.5;
  double quad_c = 1.0;
  /// Adds the energy diagnostic when set (ell, rho).
  std::optional<double> energy_ell;
  std::optional<double> energy_rho;
};

/// Simulates n_paths independent runs of `base` (path i seeded by stream_seed(master, i))
/// and returns every report, ordered by path then bound. Integral bound only at sigma = 1.
std::vector<BoundReport> run_bounds_ensemble(const SimSpec& base, const EnsembleOptions& opts);

}  // namespace gmlab
