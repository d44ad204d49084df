#pragma once

#include "gmlab/model.hpp"

namespace gmlab {

/// Inhibitor state. The integrator advances eta = xi^{1+beta}, whose equation
///
///   d eta = -(1+beta)(1 - beta sigma^2/2) eta dt + (1+beta) eta (sigma dB + dh)
///           + (1+beta) mean(u^alpha) dt
///
/// is linear with nonnegative forcing, and recovers xi = eta^{1/(1+beta)}.
struct XiState {
  double xi = 1.0;
  double eta = 1.0;
  /// M_delta(t) = int_0^t xi^{-delta} dB.
  double m_delta = 0.0;
  /// sup_s M_delta(s).
  double m_delta_sup = 0.0;
  /// sup_s |M_delta(s)|.
  double m_delta_abs_sup = 0.0;
};

XiState initial_xi_state(double zeta, double beta);

/// Exponent of the homogeneous propagator over a step:
/// -(1+beta)(1+sigma^2/2) dt + (1+beta)(sigma dB + dh).
double xi_log_propagator(double dt, double dB, double dh, double sigma, double beta);

/// One step of the transformed equation with the homogeneous part propagated
/// exactly and the forcing frozen at the left endpoint. With a = (1+beta)(1+sigma^2/2)
/// and K = exp((1+beta)(sigma dB + dh)):
///   eta' = K (e^{-a dt} eta + (1+beta) ubar_alpha (1 - e^{-a dt}) / a),
/// so G = K e^{-a dt} = exp(xi_log_propagator(...)) and the forcing weight never
/// exceeds K dt. xi' > 0 whenever xi > 0; the martingale fields are left untouched.
XiState step_xi_exact(const XiState& state, double ubar_alpha, double dt, double dB, double dh,
                      double sigma, const ModelParams& params);

/// zeta exp(-(1 + sigma^2/2) t + sigma B_t + h_t): the solution with zero
/// forcing and the pathwise lower bound for nonnegative forcing.
double xi_closed_form_zero_forcing(double zeta, double t, double B_t, double h_t, double sigma,
                                   double beta);

/// m_delta += xi^{-delta} dB (left point), then updates both running sups.
XiState accumulate_martingale(const XiState& state, double dB, double delta);

}  // namespace gmlab
