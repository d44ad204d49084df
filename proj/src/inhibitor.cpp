#include "gmlab/inhibitor.hpp"

#include <algorithm>
#include <cmath>

#include "gmlab/errors.hpp"

namespace gmlab {

XiState initial_xi_state(double zeta, double beta) {
  if (!(zeta > 0.0)) throw InvalidParameter("zeta", "must be > 0");
  XiState s;
  s.xi = zeta;
  s.eta = beta == 0.0 ? zeta : std::pow(zeta, 1.0 + beta);
  return s;
}

double xi_log_propagator(double dt, double dB, double dh, double sigma, double beta) {
  const double b1 = 1.0 + beta;
  return -b1 * (1.0 + 0.5 * sigma * sigma) * dt + b1 * (sigma * dB + dh);
}

XiState step_xi_exact(const XiState& state, double ubar_alpha, double dt, double dB, double dh,
                      double sigma, const ModelParams& params) {
  const double b1 = 1.0 + params.beta;
  const double decay = b1 * (1.0 + 0.5 * sigma * sigma);
  const double kick = std::exp(b1 * (sigma * dB + dh));
  XiState next = state;
  // Forcing weight int_0^dt e^{-decay (dt - s)} ds times the step's noise factor.
  next.eta = kick * (std::exp(-decay * dt) * state.eta - b1 * ubar_alpha * std::expm1(-decay * dt) / decay);
  next.xi = params.beta == 0.0 ? next.eta : std::pow(next.eta, 1.0 / b1);
  return next;
}

double xi_closed_form_zero_forcing(double zeta, double t, double B_t, double h_t, double sigma,
                                   double /*beta*/) {
  // The 1+beta power of the eta solution cancels against the root.
  return zeta * std::exp(-(1.0 + 0.5 * sigma * sigma) * t + sigma * B_t + h_t);
}

XiState accumulate_martingale(const XiState& state, double dB, double delta) {
  if (!(delta > 0.0)) throw InvalidParameter("delta", "must be > 0");
  XiState next = state;
  next.m_delta += std::pow(state.xi, -delta) * dB;
  next.m_delta_sup = std::max(next.m_delta_sup, next.m_delta);
  next.m_delta_abs_sup = std::max(next.m_delta_abs_sup, std::abs(next.m_delta));
  return next;
}

}  // namespace gmlab
