#include "gmlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gmlab/errors.hpp"
#include "gmlab/inhibitor.hpp"

namespace gmlab {

namespace {

// Integer ratio a/b when b divides a up to roundoff, else 0.
std::size_t exact_ratio(double a, double b) {
  const double r = a / b;
  const double k = std::round(r);
  if (k < 1.0 || std::abs(r - k) > 1e-9 * k) return 0;
  return static_cast<std::size_t>(k);
}

struct Recorder {
  Trajectory& traj;

  void step(double t, const XiState& s, double ubar, double b, double h,
            std::span<const double> u) {
    traj.step_times.push_back(t);
    traj.xi_series.push_back(s.xi);
    traj.eta_series.push_back(s.eta);
    traj.ubar_alpha_series.push_back(ubar);
    traj.noise_series.push_back(b);
    traj.control_series.push_back(h);
    double lo = u[0], hi = u[0], sq = 0.0;
    for (double v : u) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sq += v * v;
    }
    traj.u_min_series.push_back(lo);
    traj.u_max_series.push_back(hi);
    traj.u_l2_series.push_back(std::sqrt(sq / static_cast<double>(u.size())));
    traj.diagnostics.m_delta.push_back(s.m_delta);
  }

  void frame(double t, std::span<const double> u) {
    traj.times.push_back(t);
    traj.u_frames.emplace_back(std::vector<double>(u.begin(), u.end()));
  }
};

double mean_power(std::span<const double> u, double alpha) {
  double acc = 0.0;
  for (double v : u) acc += power(v, alpha);
  return acc / static_cast<double>(u.size());
}

}  // namespace

std::optional<double> default_rho(const ModelParams& params) {
  const double lo = (params.p - 1.0) / params.alpha;
  const double hi = std::min(params.q / (1.0 + params.beta), 2.0 / (params.dim + 2.0));
  if (!(lo < hi)) return std::nullopt;
  return 0.5 * (lo + hi);
}

double default_delta(const ModelParams& params) {
  const auto rho = default_rho(params);
  if (!rho) return 0.5;
  const double room = (params.q - *rho * (1.0 + params.beta)) / *rho;
  return std::min(0.5, 0.5 * room);
}

std::size_t step_count(const SimSpec& spec) { return exact_ratio(spec.horizon, spec.dt); }

void validate_spec(const SimSpec& spec) {
  const auto& g = spec.grid;
  if (g.dim() != spec.params.dim)
    throw InvalidSpec("grid dimension " + std::to_string(g.dim()) +
                      " differs from model dimension " + std::to_string(spec.params.dim));
  if (std::abs(g.length() - spec.params.domain_length) > 1e-12 * spec.params.domain_length)
    throw InvalidSpec("grid length differs from model domain_length");
  if (spec.v0.size() != g.cell_count())
    throw InvalidSpec("v0 has " + std::to_string(spec.v0.size()) + " values, grid has " +
                      std::to_string(g.cell_count()) + " cells");
  if (!spec.v0.all_finite() || spec.v0.min() < 0.0)
    throw InvalidSpec("v0 must be finite and nonnegative");
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) throw InvalidSpec("dt must be > 0");
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon))
    throw InvalidSpec("horizon must be > 0");
  if (step_count(spec) == 0) throw InvalidSpec("dt must divide the horizon");
  if (spec.save_every == 0) throw InvalidSpec("save_every must be >= 1");
  if (!(spec.blowup_threshold > 0.0)) throw InvalidSpec("blowup_threshold must be > 0");
  if (spec.delta && !(*spec.delta > 0.0)) throw InvalidSpec("delta must be > 0");
  if (spec.params.sigma > 0.0 && !spec.noise)
    throw InvalidSpec("sigma > 0 requires a Brownian path");
  if (spec.noise) {
    const auto& path = *spec.noise;
    if (path.steps() == 0) throw InvalidSpec("noise path is empty");
    if (exact_ratio(spec.dt, path.dt) == 0)
      throw InvalidSpec("noise step does not divide dt");
    if (path.horizon() < spec.horizon * (1.0 - 1e-12))
      throw InvalidSpec("noise path is shorter than the horizon");
  }
  if (spec.control && spec.control->empty()) throw InvalidSpec("control has no intervals");
}

Trajectory simulate(const SimSpec& spec) {
  validate_spec(spec);
  const auto& params = spec.params;
  const std::size_t steps = step_count(spec);
  const std::size_t stride = spec.noise ? exact_ratio(spec.dt, spec.noise->dt) : 0;
  const double delta = spec.delta.value_or(default_delta(params));
  const double dt = spec.dt;

  Trajectory traj;
  traj.params = params;
  traj.grid = spec.grid;
  traj.dt = dt;
  traj.blowup_threshold = spec.blowup_threshold;
  traj.diagnostics.delta = delta;
  for (auto* series : {&traj.step_times, &traj.xi_series, &traj.eta_series,
                       &traj.ubar_alpha_series, &traj.noise_series, &traj.control_series,
                       &traj.u_min_series, &traj.u_max_series, &traj.u_l2_series,
                       &traj.diagnostics.m_delta})
    series->reserve(steps + 1);

  auto brownian = [&](std::size_t k) { return spec.noise ? spec.noise->values[k * stride] : 0.0; };
  auto control = [&](std::size_t k) {
    return spec.control ? spec.control->value(static_cast<double>(k) * dt) : 0.0;
  };
  auto time = [&](std::size_t k) { return static_cast<double>(k) * dt; };

  SpectralWorkspace& ws = thread_workspace(spec.grid, spec.spectrum);
  std::vector<double> u = spec.v0.values;
  XiState state = initial_xi_state(params.zeta, params.beta);
  double ubar = mean_power(u, params.alpha);

  Recorder rec{traj};
  rec.step(0.0, state, ubar, 0.0, 0.0, u);
  rec.frame(0.0, u);

  for (std::size_t k = 0; k < steps; ++k) {
    const double dB = brownian(k + 1) - brownian(k);
    const double dh = control(k + 1) - control(k);
    const double xi_start = state.xi;
    bool saturated = false;

    if (spec.splitting == Splitting::Lie) {
      state = accumulate_martingale(state, dB, delta);
      state = step_xi_exact(state, ubar, dt, dB, dh, params.sigma, params);
      saturated = step_u_imex_inplace(u, xi_start, dt, params, ws, spec.blowup_threshold);
    } else {
      saturated = step_u_imex_inplace(u, xi_start, 0.5 * dt, params, ws, spec.blowup_threshold);
      const double ubar_mid = mean_power(u, params.alpha);
      state = accumulate_martingale(state, dB, delta);
      state = step_xi_exact(state, ubar_mid, dt, dB, dh, params.sigma, params);
      saturated = saturated ||
                  step_u_imex_inplace(u, state.xi, 0.5 * dt, params, ws, spec.blowup_threshold);
    }

    if (saturated) {
      traj.blowup_time = time(k + 1);
      double sup = 0.0;
      for (double v : u) {
        if (!std::isfinite(v)) {
          sup = std::numeric_limits<double>::infinity();
          break;
        }
        sup = std::max(sup, v);
      }
      traj.blowup_sup = sup;
      break;
    }

    ubar = mean_power(u, params.alpha);
    rec.step(time(k + 1), state, ubar, brownian(k + 1), control(k + 1), u);
    if ((k + 1) % spec.save_every == 0 || k + 1 == steps) rec.frame(time(k + 1), u);
  }

  traj.diagnostics.m_sup = state.m_delta_sup;
  traj.diagnostics.m_abs_sup = state.m_delta_abs_sup;
  return traj;
}

double local_existence_horizon(double N, double M, double v_sup, const ModelParams& params) {
  if (!(N > 0.0)) throw InvalidParameter("N", "must be > 0");
  if (!(M > 2.0 + v_sup + std::exp(N) * params.zeta))
    throw InvalidParameter("M", "must exceed 2 + ‖v‖ + e^N zeta");
  const double q = params.q, b = params.beta;
  const double t1 = std::exp(-1.5 * q - N * q) * std::pow(params.zeta, q) * std::pow(M, -params.p);
  const double t2 = std::exp(-1.5 * b - N * b - 2.0 * N) * std::pow(M, -params.alpha);
  return std::min({t1, t2, 1.0});
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
  const double tol = 1e-9 * std::max(a.dt, b.dt);
  auto xi_at = [tol](const Trajectory& tr, double t) -> std::optional<double> {
    auto it = std::lower_bound(tr.step_times.begin(), tr.step_times.end(), t - tol);
    if (it == tr.step_times.end() || std::abs(*it - t) > tol) return std::nullopt;
    return tr.xi_series[static_cast<std::size_t>(it - tr.step_times.begin())];
  };
  double worst = 0.0;
  std::size_t shared = 0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double t = a.times[i];
    auto it = std::lower_bound(b.times.begin(), b.times.end(), t - tol);
    if (it == b.times.end() || std::abs(*it - t) > tol) continue;
    const auto& ub = b.u_frames[static_cast<std::size_t>(it - b.times.begin())];
    const auto& ua = a.u_frames[i];
    if (ua.size() != ub.size()) throw InvalidSpec("trajectories live on different grids");
    const auto xa = xi_at(a, t), xb = xi_at(b, t);
    if (!xa || !xb) continue;
    double du = 0.0;
    for (std::size_t j = 0; j < ua.size(); ++j) du = std::max(du, std::abs(ua[j] - ub[j]));
    worst = std::max(worst, du + std::abs(*xa - *xb));
    ++shared;
  }
  if (shared == 0) throw InvalidSpec("trajectories share no saved times");
  return worst;
}

std::optional<BlowupEvent> detect_blowup(const Trajectory& traj) {
  if (traj.blowup_time) return BlowupEvent{*traj.blowup_time, traj.blowup_sup};
  for (std::size_t k = 0; k < traj.u_max_series.size(); ++k)
    if (!(traj.u_max_series[k] <= traj.blowup_threshold))
      return BlowupEvent{traj.step_times[k], traj.u_max_series[k]};
  return std::nullopt;
}

}  // namespace gmlab
