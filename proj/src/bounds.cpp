#include "gmlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gmlab/csv.hpp"
#include "gmlab/errors.hpp"
#include "gmlab/parallel.hpp"

namespace gmlab {

namespace {

// Step of `path` per step of `traj`, checking the path covers and drives the run.
std::size_t path_stride(const Trajectory& traj, const BrownianPath& path) {
  if (path.steps() == 0) throw MismatchedPath("empty Brownian path");
  const double r = traj.dt / path.dt;
  const double k = std::round(r);
  if (k < 1.0 || std::abs(r - k) > 1e-9 * k)
    throw MismatchedPath("path step does not divide the trajectory step");
  const auto stride = static_cast<std::size_t>(k);
  if (traj.step_count() == 0 || (traj.step_count() - 1) * stride > path.steps())
    throw MismatchedPath("path is shorter than the trajectory");
  if (traj.params.sigma != 0.0) {
    for (std::size_t i = 0; i < traj.step_count(); ++i)
      if (traj.noise_series[i] != path.values[i * stride])
        throw MismatchedPath("path values differ from the driving noise at step " +
                             std::to_string(i));
  }
  return stride;
}

// Number of steps with t <= 1 (the unit window the estimates are stated on).
std::size_t unit_window(const Trajectory& traj) {
  std::size_t n = 0;
  while (n < traj.step_count() && traj.step_times[n] <= 1.0 + 1e-12) ++n;
  return n;
}

double trapezoid_integrand(const Trajectory& traj, std::size_t count, double exponent) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double a = traj.ubar_alpha_series[k] / std::pow(traj.xi_series[k], exponent);
    const double b = traj.ubar_alpha_series[k + 1] / std::pow(traj.xi_series[k + 1], exponent);
    acc += 0.5 * (traj.step_times[k + 1] - traj.step_times[k]) * (a + b);
  }
  return acc;
}

// sup_t |int_0^t xi^{-delta} dB| with the left-point sum the integrator uses.
double martingale_abs_sup(const Trajectory& traj, std::size_t count, double delta) {
  double m = 0.0, sup = 0.0;
  for (std::size_t k = 0; k + 1 < count; ++k) {
    m += std::pow(traj.xi_series[k], -delta) * (traj.noise_series[k + 1] - traj.noise_series[k]);
    sup = std::max(sup, std::abs(m));
  }
  return sup;
}

// Tracks the tightest point of a pointwise inequality.
struct Worst {
  double lhs = 0.0, rhs = 0.0, time = 0.0, rel = std::numeric_limits<double>::infinity();
  bool seen = false;

  void offer(double l, double r, double t) {
    const double scale = std::max({std::abs(l), std::abs(r), std::numeric_limits<double>::min()});
    const double rel_margin = (r - l) / scale;
    if (!seen || rel_margin < rel) {
      lhs = l;
      rhs = r;
      time = t;
      rel = rel_margin;
      seen = true;
    }
  }

  BoundReport report(std::string name, double rel_tol, std::size_t path_id) const {
    const double tol = rel_tol * std::max(std::abs(lhs), std::abs(rhs));
    return make_report(std::move(name), lhs, rhs, tol, path_id, time);
  }
};

}  // namespace

BoundReport make_report(std::string name, double lhs, double rhs, double tolerance,
                        std::size_t path_id, double time) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.tolerance = tolerance;
  r.pass = r.margin >= -tolerance;
  r.path_id = path_id;
  r.time = time;
  return r;
}

std::vector<BoundReport> check_xi_bounds(const Trajectory& traj, const BrownianPath& path,
                                         const ModelParams& params, std::size_t path_id,
                                         double rel_tol) {
  const std::size_t stride = path_stride(traj, path);
  const double sigma = params.sigma;
  const double b1 = 1.0 + params.beta;
  const double drift = 1.0 + 0.5 * sigma * sigma;

  Worst lower, lower_inf, upper;
  double h_star = 0.0, h_min = 0.0, h_max = 0.0, forcing = 0.0;
  for (std::size_t k = 0; k < traj.step_count(); ++k) {
    const double t = traj.step_times[k];
    const double xi = traj.xi_series[k];
    const double B = sigma == 0.0 ? 0.0 : traj.noise_series[k];
    const double b_star = path.sup_abs[k * stride];
    const double h = traj.control_series[k];
    h_star = std::max(h_star, std::abs(h));
    h_min = std::min(h_min, h);
    h_max = std::max(h_max, h);
    if (k > 0) forcing += traj.ubar_alpha_series[k - 1] * (t - traj.step_times[k - 1]);

    lower.offer(params.zeta * std::exp(-drift * t + sigma * B + h), xi, t);
    lower_inf.offer(params.zeta * std::exp(-drift * t - sigma * b_star - h_star), xi, t);
    const double eta_rhs = std::exp(b1 * (sigma * b_star + h_star)) * std::pow(params.zeta, b1) +
                           b1 * std::exp(b1 * (2.0 * sigma * b_star + (h_max - h_min))) * forcing;
    upper.offer(traj.eta_series[k], eta_rhs, t);
  }
  return {lower.report("xi_lower", rel_tol, path_id),
          lower_inf.report("xi_lower_inf", rel_tol, path_id),
          upper.report("eta_upper", rel_tol, path_id)};
}

double integral_bound_rhs(double delta, double zeta, double sigma, double b_star,
                          double m_abs_sup) {
  const double s2 = sigma * sigma;
  const double zd = std::pow(zeta, -delta);
  return zd / delta +
         0.5 * (2.0 + s2 + delta * s2) * std::exp(delta * (1.0 + 0.5 * s2) + delta * sigma * b_star) * zd +
         sigma * m_abs_sup;
}

BoundReport check_integral_bound(const Trajectory& traj, const BrownianPath& path, double delta,
                                 std::size_t path_id, double quad_c) {
  if (traj.params.sigma != 1.0)
    throw WrongNormalization("integral bound is stated for sigma = 1, got sigma = " +
                             std::to_string(traj.params.sigma));
  if (!(delta > 0.0)) throw InvalidParameter("delta", "must be > 0");
  const std::size_t stride = path_stride(traj, path);
  const std::size_t count = unit_window(traj);
  const double b_star = path.sup_abs[(count - 1) * stride];
  const double lhs = trapezoid_integrand(traj, count, 1.0 + traj.params.beta + delta);
  const double rhs = integral_bound_rhs(delta, traj.params.zeta, 1.0, b_star,
                                        martingale_abs_sup(traj, count, delta));
  return make_report("integral_bound", lhs, rhs, quad_c * traj.dt * std::max(1.0, lhs), path_id);
}

EnergyConstraints energy_constraints(const ModelParams& params, double ell, double rho,
                                     double delta) {
  auto fail = [](const std::string& what) { throw ConstraintViolation(what); };
  if (!(ell > 0.0)) fail("ell must be > 0");
  if (!(rho < params.q / (1.0 + params.beta))) fail("rho < q/(1+beta) fails");
  if (!((params.p - 1.0) / params.alpha < rho)) fail("(p-1)/alpha < rho fails");
  if (!(rho < 2.0 / (params.dim + 2.0))) fail("rho < 2/(d+2) fails");
  EnergyConstraints c;
  c.rho = rho;
  c.ell = ell;
  c.delta = delta;
  c.theta = (params.p - 1.0 - params.alpha * rho + ell) / ell;
  if (!(c.theta > 0.0 && c.theta < 1.0)) fail("theta in (0,1) fails; increase ell");
  c.gamma = params.dim * (rho + c.theta - 1.0) / (2.0 * c.theta);
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) fail("gamma in (0,1) fails; increase ell");
  c.holder_exponent = rho / (1.0 - c.gamma * c.theta);
  if (!(c.holder_exponent < 1.0)) fail("rho/(1 - gamma theta) < 1 fails; increase ell");
  const double delta_max = (params.q - rho - rho * params.beta) / rho;
  if (!(delta > 0.0 && delta < delta_max))
    fail("delta in (0, (q - rho - rho beta)/rho) fails");
  return c;
}

BoundReport check_energy_diagnostic(const Trajectory& traj, const BrownianPath& path, double ell,
                                    double rho, double delta, const ModelParams& params,
                                    std::size_t path_id) {
  const EnergyConstraints c = energy_constraints(params, ell, rho, delta);
  for (double h : traj.control_series)
    if (h != 0.0) throw MismatchedControl("energy diagnostic applies to uncontrolled runs");
  const std::size_t stride = path_stride(traj, path);
  const std::size_t count = unit_window(traj);
  const double sigma = params.sigma;
  const double b_star = path.sup_abs[(count - 1) * stride];

  auto mean_pow = [ell](const Field& u) {
    double acc = 0.0;
    for (double v : u.values) acc += std::pow(v, ell);
    return acc / static_cast<double>(u.size());
  };
  double lhs = 0.0;
  for (std::size_t i = 0; i < traj.times.size() && traj.times[i] <= 1.0 + 1e-12; ++i)
    lhs = std::max(lhs, mean_pow(traj.u_frames[i]));

  const double one_tg = 1.0 - c.theta * c.gamma;
  const double e = (rho * (1.0 + params.beta + delta) - params.q) / one_tg;  // negative
  const double theta_big =
      std::pow(params.zeta, e) * std::exp(-e * (1.0 + 0.5 * sigma * sigma) - e * sigma * b_star);
  const double lambda = integral_bound_rhs(delta, params.zeta, sigma, b_star,
                                           martingale_abs_sup(traj, count, delta));
  const double v_norm = std::pow(mean_pow(traj.u_frames.front()), 1.0 / ell);
  const double rhs = std::max(
      1.0, std::pow(v_norm, one_tg * ell / (1.0 - c.theta)) +
               std::pow(theta_big, one_tg / (1.0 - c.theta)) * std::pow(lambda, rho / (1.0 - c.theta)));
  BoundReport r = make_report("energy_ratio", lhs, rhs, 0.0, path_id);
  r.hard = false;
  r.pass = std::isfinite(lhs / rhs);
  return r;
}

std::vector<BoundReport> check_skeleton_bounds(const Trajectory& traj,
                                               const CameronMartinControl& control, double delta,
                                               std::size_t path_id, double quad_c,
                                               double rel_tol) {
  if (traj.params.sigma != 0.0)
    throw InvalidParameter("sigma", "skeleton bounds need a noise-free run");
  if (!(delta > 0.0)) throw InvalidParameter("delta", "must be > 0");
  for (std::size_t k = 0; k < traj.step_count(); ++k) {
    const double expected = control.value(traj.step_times[k]);
    if (std::abs(traj.control_series[k] - expected) > 1e-12 * std::max(1.0, std::abs(expected)))
      throw MismatchedControl("trajectory was not driven by this control (step " +
                              std::to_string(k) + ")");
  }
  const double norm = control.norm_h();
  const double zeta = traj.params.zeta;
  std::vector<BoundReport> out;

  Worst lower;
  for (std::size_t k = 0; k < traj.step_count(); ++k)
    lower.offer(std::exp(-traj.step_times[k] - norm) * zeta, traj.xi_series[k], traj.step_times[k]);
  out.push_back(lower.report("skeleton_xi_lower", rel_tol, path_id));

  const std::size_t count = unit_window(traj);
  const double lhs = trapezoid_integrand(traj, count, 1.0 + traj.params.beta + delta);
  const double grow = std::exp(delta * (1.0 + norm)) * std::pow(zeta, -delta);
  const double rhs = std::pow(zeta, -delta) / delta + grow * (1.0 + norm);
  out.push_back(make_report("skeleton_integral", lhs, rhs, quad_c * traj.dt * std::max(1.0, lhs),
                            path_id));

  Worst sharp, weak;
  const auto& h = traj.control_series;
  for (std::size_t j = 0; j < h.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double dh = std::abs(h[j] - h[i]);
      const double span = traj.step_times[j] - traj.step_times[i];
      sharp.offer(dh, norm * std::sqrt(span), traj.step_times[j]);
      weak.offer(dh, norm, traj.step_times[j]);
    }
  }
  if (h.size() < 2) {
    sharp.offer(0.0, 0.0, 0.0);
    weak.offer(0.0, norm, 0.0);
  }
  out.push_back(sharp.report("modulus_sqrt", rel_tol, path_id));
  out.push_back(weak.report("modulus_norm", rel_tol, path_id));
  return out;
}

std::vector<BoundSummary> summarize(const std::vector<BoundReport>& reports, double dt) {
  std::vector<BoundSummary> rows;
  for (const auto& r : reports) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& s) { return s.name == r.name; });
    if (it == rows.end()) {
      rows.push_back({r.name, 0, 0, r.margin, dt, r.hard});
      it = rows.end() - 1;
    }
    ++it->n_paths;
    if (r.pass) ++it->n_pass;
    it->worst_margin = std::min(it->worst_margin, r.margin);
  }
  return rows;
}

void write_summary_csv(const std::vector<BoundSummary>& rows, std::ostream& out) {
  out << "name,n_paths,n_pass,worst_margin,dt\n";
  for (const auto& r : rows)
    csv_row(out, {r.name, std::to_string(r.n_paths), std::to_string(r.n_pass),
                  fmt17(r.worst_margin), fmt17(r.dt)});
}

void write_reports_csv(const std::vector<BoundReport>& reports, std::ostream& out) {
  out << "name,path_id,lhs,rhs,margin,tolerance,pass,time\n";
  for (const auto& r : reports)
    csv_row(out, {r.name, std::to_string(r.path_id), fmt17(r.lhs), fmt17(r.rhs), fmt17(r.margin),
                  fmt17(r.tolerance), r.pass ? "1" : "0", fmt17(r.time)});
}

std::vector<BoundReport> run_bounds_ensemble(const SimSpec& base, const EnsembleOptions& opts) {
  if (opts.n_paths == 0) throw InvalidParameter("n_paths", "must be >= 1");
  if (opts.noise_substeps == 0) throw InvalidParameter("noise_substeps", "must be >= 1");
  const std::size_t steps = step_count(base);
  if (steps == 0) throw InvalidSpec("dt must divide the horizon");
  if (opts.energy_ell && opts.energy_rho)
    energy_constraints(base.params, *opts.energy_ell, *opts.energy_rho, opts.delta);

  std::vector<std::vector<BoundReport>> per_path(opts.n_paths);
  parallel_for(opts.n_paths, opts.threads, [&](std::size_t i) {
    SimSpec spec = base;
    spec.delta = opts.delta;
    const BrownianPath path = sample_brownian(steps * opts.noise_substeps, base.horizon,
                                              stream_seed(opts.master_seed, i));
    spec.noise = path;
    const Trajectory traj = simulate(spec);
    auto& out = per_path[i];
    out = check_xi_bounds(traj, path, spec.params, i);
    if (spec.params.sigma == 1.0) out.push_back(check_integral_bound(traj, path, opts.delta, i, opts.quad_c));
    if (opts.energy_ell && opts.energy_rho)
      out.push_back(check_energy_diagnostic(traj, path, *opts.energy_ell, *opts.energy_rho,
                                            opts.delta, spec.params, i));
    if (traj.blowup_time) {
      BoundReport r = make_report("no_blowup", 0.0, -1.0, 0.0, i, *traj.blowup_time);
      out.push_back(r);
    }
  });
  std::vector<BoundReport> all;
  for (auto& v : per_path) all.insert(all.end(), v.begin(), v.end());
  return all;
}

}  // namespace gmlab
