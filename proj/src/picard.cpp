#include <algorithm>
#include <cmath>
#include <vector>

#include "gmlab/errors.hpp"
#include "gmlab/simulate.hpp"

namespace gmlab {

namespace {

using Frames = std::vector<std::vector<double>>;

double mean_power(const std::vector<double>& u, double alpha) {
  double acc = 0.0;
  for (double v : u) acc += power(v, alpha);
  return acc / static_cast<double>(u.size());
}

}  // namespace

PicardResult picard_solve(const SimSpec& spec, double tol, std::size_t max_iter) {
  validate_spec(spec);
  if (!(tol > 0.0)) throw InvalidParameter("tol", "must be > 0");
  if (max_iter == 0) throw InvalidParameter("max_iter", "must be >= 1");

  const auto& params = spec.params;
  const std::size_t steps = step_count(spec);
  const double dt = spec.dt;
  const double sigma = params.sigma;
  const std::size_t stride =
      spec.noise ? static_cast<std::size_t>(std::llround(dt / spec.noise->dt)) : 0;

  SpectralWorkspace& ws = thread_workspace(spec.grid, spec.spectrum);
  const auto lambda = ws.eigenvalues();
  const std::size_t cells = spec.grid.cell_count();

  std::vector<double> t(steps + 1), B(steps + 1, 0.0), H(steps + 1, 0.0), R(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    t[k] = static_cast<double>(k) * dt;
    if (spec.noise) B[k] = spec.noise->values[k * stride];
    if (spec.control) H[k] = spec.control->value(t[k]);
    // R(t, B_t) zeta is the homogeneous inhibitor solution.
    R[k] = std::exp(-(1.0 + 0.5 * sigma * sigma) * t[k] + sigma * B[k] + H[k]);
  }

  // Mode decay factors exp(-(1 + lambda) dt) and the free evolution S(t_k) v.
  std::vector<double> decay(cells);
  for (std::size_t i = 0; i < cells; ++i) decay[i] = std::exp(-(1.0 + lambda[i]) * dt);
  std::vector<double> v_hat(cells);
  ws.forward(spec.v0.values, v_hat);

  Frames u(steps + 1, std::vector<double>(cells));
  std::vector<double> xi(steps + 1);
  {
    std::vector<double> c = v_hat;
    for (std::size_t k = 0; k <= steps; ++k) {
      ws.inverse(c, u[k]);
      for (double& x : u[k]) x = std::max(x, 0.0);
      for (std::size_t i = 0; i < cells; ++i) c[i] *= decay[i];
      xi[k] = R[k] * params.zeta;
    }
    u[0] = spec.v0.values;
  }

  PicardResult result;
  Frames f_hat(steps + 1, std::vector<double>(cells));
  Frames u_next(steps + 1, std::vector<double>(cells));
  std::vector<double> xi_next(steps + 1), q_acc(cells), e_k(cells), coeff(cells), tmp(cells);

  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    // Activator: trapezoid of S(t_k - s) f(s) via the recursion
    //   Q_k = E(dt) Q_{k-1} + F_k,  integral = dt (Q_k - E(t_k) F_0 / 2 - F_k / 2).
    for (std::size_t k = 0; k <= steps; ++k) {
      if (!(xi[k] > 0.0)) throw DegenerateInhibitor("nonpositive inhibitor in Picard iterate");
      const double inv = std::pow(xi[k], -params.q);
      for (std::size_t i = 0; i < cells; ++i) tmp[i] = power(u[k][i], params.p) * inv;
      ws.forward(tmp, f_hat[k]);
    }
    q_acc = f_hat[0];
    std::fill(e_k.begin(), e_k.end(), 1.0);
    u_next[0] = spec.v0.values;
    std::vector<double> free_hat = v_hat;
    for (std::size_t k = 1; k <= steps; ++k) {
      for (std::size_t i = 0; i < cells; ++i) {
        q_acc[i] = decay[i] * q_acc[i] + f_hat[k][i];
        e_k[i] *= decay[i];
        free_hat[i] *= decay[i];
        coeff[i] = free_hat[i] + dt * (q_acc[i] - 0.5 * e_k[i] * f_hat[0][i] - 0.5 * f_hat[k][i]);
      }
      ws.inverse(coeff, u_next[k]);
      for (double& x : u_next[k]) x = std::max(x, 0.0);
    }

    // Inhibitor: xi_k = R_k (zeta + trapz_{0..k} g / R), g = mean(u^alpha) / xi^beta.
    double acc = 0.0;
    double prev = mean_power(u[0], params.alpha) * std::pow(xi[0], -params.beta) / R[0];
    xi_next[0] = params.zeta;
    for (std::size_t k = 1; k <= steps; ++k) {
      const double cur = mean_power(u[k], params.alpha) * std::pow(xi[k], -params.beta) / R[k];
      acc += 0.5 * dt * (prev + cur);
      prev = cur;
      xi_next[k] = R[k] * (params.zeta + acc);
    }

    double du = 0.0, dxi = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
      for (std::size_t i = 0; i < cells; ++i)
        du = std::max(du, std::abs(u_next[k][i] - u[k][i]));
      dxi = std::max(dxi, std::abs(xi_next[k] - xi[k]));
    }
    const double distance = du + dxi;
    if (!std::isfinite(distance)) throw NoConvergence(iter, distance);
    result.distances.push_back(distance);
    std::swap(u, u_next);
    std::swap(xi, xi_next);
    if (distance < tol) {
      result.iterations = iter;
      break;
    }
    if (iter == max_iter) throw NoConvergence(iter, distance);
  }

  Trajectory& traj = result.trajectory;
  traj.params = params;
  traj.grid = spec.grid;
  traj.dt = dt;
  traj.blowup_threshold = spec.blowup_threshold;
  const double delta = spec.delta.value_or(default_delta(params));
  traj.diagnostics.delta = delta;
  double m = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    if (k > 0) m += std::pow(xi[k - 1], -delta) * (B[k] - B[k - 1]);
    traj.diagnostics.m_delta.push_back(m);
    traj.diagnostics.m_sup = std::max(traj.diagnostics.m_sup, m);
    traj.diagnostics.m_abs_sup = std::max(traj.diagnostics.m_abs_sup, std::abs(m));
    const auto& uk = u[k];
    traj.step_times.push_back(t[k]);
    traj.xi_series.push_back(xi[k]);
    traj.eta_series.push_back(std::pow(xi[k], 1.0 + params.beta));
    traj.ubar_alpha_series.push_back(mean_power(uk, params.alpha));
    traj.noise_series.push_back(B[k]);
    traj.control_series.push_back(H[k]);
    traj.u_min_series.push_back(*std::min_element(uk.begin(), uk.end()));
    traj.u_max_series.push_back(*std::max_element(uk.begin(), uk.end()));
    double sq = 0.0;
    for (double v : uk) sq += v * v;
    traj.u_l2_series.push_back(std::sqrt(sq / static_cast<double>(cells)));
    if (k % spec.save_every == 0 || k == steps) {
      traj.times.push_back(t[k]);
      traj.u_frames.emplace_back(uk);
    }
  }
  return result;
}

}  // namespace gmlab
