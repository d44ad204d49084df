#include "gmlab/ldp.hpp"

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "gmlab/csv.hpp"
#include "gmlab/errors.hpp"
#include "gmlab/parallel.hpp"
#include "gmlab/rng.hpp"
#include "gmlab/stats.hpp"

namespace gmlab {

namespace {

constexpr double kZ95 = 1.959963984540054;

SimSpec skeleton_spec(const SimSpec& spec) {
  if (spec.params.sigma != 0.0)
    throw InvalidParameter("sigma", "skeleton dynamics need sigma = 0");
  SimSpec s = spec;
  s.noise.reset();
  s.control.reset();
  s.save_every = std::max<std::size_t>(1, step_count(spec));
  validate_spec(s);
  return s;
}

// Penalised objective in the scaled variables z_i = hdot_i sqrt(dt_h), so that
// 1/2 ‖h‖_H^2 = 1/2 |z|^2.
class PenaltyProblem {
 public:
  PenaltyProblem(const EventSpec& event, const SimSpec& base, const MinimizeOptions& opts)
      : event_(event), base_(base), opts_(opts),
        dt_h_(base.horizon / static_cast<double>(opts.m_intervals)),
        scale_(1.0 / std::sqrt(dt_h_)) {}

  double mu = 1.0;
  std::size_t evaluations = 0;

  CameronMartinControl control(const std::vector<double>& z) const {
    std::vector<double> hdot(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) hdot[i] = z[i] * scale_;
    return CameronMartinControl(std::move(hdot), dt_h_);
  }

  double gap(const std::vector<double>& z) {
    if (z == cached_z_) return cached_gap_;
    cached_gap_ = run_gap(z);
    cached_z_ = z;
    return cached_gap_;
  }

  double objective(const std::vector<double>& z) {
    const double g = std::max(0.0, gap(z));
    return 0.5 * dot(z, z) + mu * g * g;
  }

  void gradient(const std::vector<double>& z, std::vector<double>& grad) {
    const double g = gap(z);
    grad = z;
    if (g <= 0.0) return;
    std::vector<double> probe_gap(z.size());
    std::vector<double> steps(z.size());
    parallel_for(z.size(), opts_.threads, [&](std::size_t i) {
      std::vector<double> zp = z;
      steps[i] = opts_.fd_step * std::max(1.0, std::abs(z[i]));
      zp[i] += steps[i];
      probe_gap[i] = run_gap(zp);
    });
    for (std::size_t i = 0; i < z.size(); ++i) {
      // Forward difference of the penalty term max(0, gap)^2 via the chain rule.
      const double dgap = (probe_gap[i] - g) / steps[i];
      grad[i] += 2.0 * mu * g * dgap;
    }
  }

  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  }

 private:
  double run_gap(const std::vector<double>& z) {
    SimSpec s = base_;
    s.control = control(z);
    ++evaluations;
    return event_gap(event_, simulate(s));
  }

  EventSpec event_;
  SimSpec base_;
  MinimizeOptions opts_;
  double dt_h_;
  double scale_;
  std::vector<double> cached_z_;
  double cached_gap_ = 0.0;
};

std::vector<double> to_std(const gsl_vector* x) {
  std::vector<double> out(x->size);
  for (std::size_t i = 0; i < x->size; ++i) out[i] = gsl_vector_get(x, i);
  return out;
}

void from_std(const std::vector<double>& v, gsl_vector* x) {
  for (std::size_t i = 0; i < v.size(); ++i) gsl_vector_set(x, i, v[i]);
}

double gsl_f(const gsl_vector* x, void* p) {
  return static_cast<PenaltyProblem*>(p)->objective(to_std(x));
}

void gsl_df(const gsl_vector* x, void* p, gsl_vector* g) {
  std::vector<double> grad;
  static_cast<PenaltyProblem*>(p)->gradient(to_std(x), grad);
  from_std(grad, g);
}

void gsl_fdf(const gsl_vector* x, void* p, double* f, gsl_vector* g) {
  auto* problem = static_cast<PenaltyProblem*>(p);
  const auto z = to_std(x);
  *f = problem->objective(z);
  std::vector<double> grad;
  problem->gradient(z, grad);
  from_std(grad, g);
}

}  // namespace

Observable parse_observable(std::string_view name) {
  if (name == "terminal-xi") return Observable::TerminalXi;
  if (name == "terminal-u-mean") return Observable::TerminalUMean;
  if (name == "sup-xi") return Observable::SupXi;
  if (name == "inf-xi") return Observable::InfXi;
  throw InvalidParameter("observable", "unknown observable '" + std::string(name) + "'");
}

std::string to_string(Observable obs) {
  switch (obs) {
    case Observable::TerminalXi: return "terminal-xi";
    case Observable::TerminalUMean: return "terminal-u-mean";
    case Observable::SupXi: return "sup-xi";
    case Observable::InfXi: return "inf-xi";
  }
  return "?";
}

Direction parse_direction(std::string_view text) {
  if (text == ">=" || text == "ge") return Direction::AtLeast;
  if (text == "<=" || text == "le") return Direction::AtMost;
  throw InvalidParameter("direction", "expected >= or <=, got '" + std::string(text) + "'");
}

std::string to_string(Direction dir) { return dir == Direction::AtLeast ? ">=" : "<="; }

std::string to_string(RateStatus status) {
  switch (status) {
    case RateStatus::Converged: return "converged";
    case RateStatus::NotConverged: return "not-converged";
    case RateStatus::Infeasible: return "infeasible";
  }
  return "?";
}

std::string to_string(SamplingMethod method) {
  return method == SamplingMethod::Plain ? "plain" : "tilted";
}

double observe(const Trajectory& traj, Observable obs) {
  if (traj.step_count() == 0) throw InvalidSpec("empty trajectory");
  switch (obs) {
    case Observable::TerminalXi: return traj.xi_series.back();
    case Observable::TerminalUMean: {
      const auto& u = traj.u_frames.back().values;
      double acc = 0.0;
      for (double v : u) acc += v;
      return acc / static_cast<double>(u.size());
    }
    case Observable::SupXi: return *std::max_element(traj.xi_series.begin(), traj.xi_series.end());
    case Observable::InfXi: return *std::min_element(traj.xi_series.begin(), traj.xi_series.end());
  }
  return 0.0;
}

double event_gap(const EventSpec& event, const Trajectory& traj) {
  const double value = observe(traj, event.observable);
  return event.direction == Direction::AtLeast ? event.threshold - value
                                               : value - event.threshold;
}

double rate_functional(const CameronMartinControl& h) {
  const double n = h.norm_h();
  return 0.5 * n * n;
}

RateResult minimize_rate(const EventSpec& event, const SimSpec& spec,
                         const MinimizeOptions& opts) {
  if (opts.m_intervals == 0) throw InvalidParameter("m_intervals", "must be >= 1");
  if (opts.stages == 0) throw InvalidParameter("stages", "must be >= 1");
  if (!(opts.mu0 > 0.0) || !(opts.mu_factor >= 1.0))
    throw InvalidParameter("mu0", "need mu0 > 0 and mu_factor >= 1");
  const SimSpec base = skeleton_spec(spec);
  PenaltyProblem problem(event, base, opts);
  const std::size_t m = opts.m_intervals;

  std::vector<double> z(m, 0.0);
  if (opts.initial_hdot) {
    if (opts.initial_hdot->size() != m)
      throw InvalidParameter("initial_hdot", "length must equal m_intervals");
    const double s = std::sqrt(base.horizon / static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i) z[i] = (*opts.initial_hdot)[i] * s;
  }

  gsl_set_error_handler_off();
  gsl_vector* x = gsl_vector_alloc(m);
  gsl_multimin_fdfminimizer* s =
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, m);
  gsl_multimin_function_fdf fn{&gsl_f, &gsl_df, &gsl_fdf, m, &problem};

  RateResult result;
  double mu = opts.mu0;
  for (std::size_t stage = 0; stage < opts.stages; ++stage, mu *= opts.mu_factor) {
    problem.mu = mu;
    from_std(z, x);
    const double step = 0.1 * std::max(1.0, std::sqrt(PenaltyProblem::dot(z, z)));
    gsl_multimin_fdfminimizer_set(s, &fn, x, step, 0.1);
    for (std::size_t it = 1; it <= opts.max_iter_per_stage; ++it) {
      const int status = gsl_multimin_fdfminimizer_iterate(s);
      ++result.iterations;
      const auto zc = to_std(s->x);
      result.trace.push_back({stage, it, mu, s->f, 0.5 * PenaltyProblem::dot(zc, zc),
                              problem.gap(zc), gsl_blas_dnrm2(s->gradient)});
      if (status != GSL_SUCCESS) break;
      const double tol = opts.grad_tol * std::max(1.0, std::sqrt(PenaltyProblem::dot(zc, zc)));
      if (gsl_multimin_test_gradient(s->gradient, tol) == GSL_SUCCESS) break;
    }
    z = to_std(s->x);
  }
  gsl_multimin_fdfminimizer_free(s);
  gsl_vector_free(x);

  const double scale = std::max(1.0, std::abs(event.threshold));
  result.h_star = problem.control(z);
  result.final_gap = problem.gap(z);
  if (result.final_gap <= opts.feasibility_tol * scale) {
    result.status = RateStatus::Converged;
    result.converged = true;
    result.I_star = rate_functional(result.h_star);
  } else if (result.final_gap > opts.infeasible_tol * scale) {
    result.status = RateStatus::Infeasible;
    result.I_star = std::numeric_limits<double>::infinity();
  } else {
    result.status = RateStatus::NotConverged;
    result.I_star = rate_functional(result.h_star);
  }
  return result;
}

LadderRow mc_tail_probability(const EventSpec& event, const SimSpec& spec, double epsilon,
                              std::size_t n_samples, std::uint64_t seed,
                              const std::optional<CameronMartinControl>& tilt,
                              std::size_t threads) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidParameter("epsilon", "must be > 0");
  if (n_samples == 0) throw InvalidParameter("n_samples", "must be >= 1");
  SimSpec base = spec;
  base.params.sigma = std::sqrt(epsilon);
  base.control.reset();
  base.noise.reset();
  base.save_every = std::max<std::size_t>(1, step_count(spec));
  const std::size_t steps = step_count(base);
  if (steps == 0) throw InvalidSpec("dt must divide the horizon");
  const double sqrt_eps = std::sqrt(epsilon);

  double log_norm = 0.0;
  if (tilt) {
    if (tilt->empty()) throw InvalidParameter("tilt", "empty control");
    if (std::abs(tilt->horizon() - base.horizon) > 1e-9 * base.horizon)
      throw InvalidSpec("tilt control must span the simulation horizon");
    const double r = tilt->dt_h() / base.dt;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r) || std::round(r) < 1.0)
      throw InvalidSpec("tilt control cells must be unions of simulation steps");
    const double norm = tilt->norm_h();
    log_norm = -norm * norm / (2.0 * epsilon);
    base.control = *tilt;
  }

  std::vector<double> samples(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    SimSpec s = base;
    s.noise = sample_brownian(steps, base.horizon, stream_seed(seed, i));
    const Trajectory traj = simulate(s);
    if (!event_holds(event, traj)) {
      samples[i] = 0.0;
      return;
    }
    if (!tilt) {
      samples[i] = 1.0;
      return;
    }
    double stoch = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
      const double t_mid = (static_cast<double>(k) + 0.5) * base.dt;
      stoch += tilt->rate(t_mid) * s.noise->increment(k);
    }
    samples[i] = std::exp(-stoch / sqrt_eps + log_norm);
  });

  LadderRow row;
  row.epsilon = epsilon;
  row.n_samples = n_samples;
  if (!tilt) {
    std::size_t hits = 0;
    for (double v : samples) hits += v > 0.0 ? 1 : 0;
    row.method = SamplingMethod::Plain;
    row.p_hat = static_cast<double>(hits) / static_cast<double>(n_samples);
    row.ci_halfwidth = wilson_halfwidth(hits, n_samples, kZ95);
  } else {
    const MeanEstimate est = mean_estimate(samples);
    row.method = SamplingMethod::Tilted;
    row.p_hat = est.mean;
    row.ci_halfwidth = kZ95 * est.std_error;
  }
  row.neg_eps_log_p = row.p_hat > 0.0 ? -epsilon * std::log(row.p_hat)
                                      : std::numeric_limits<double>::infinity();
  return row;
}

LadderResult ldp_ladder(const EventSpec& event, const SimSpec& spec,
                        const std::vector<double>& eps_list, std::size_t n_samples,
                        std::uint64_t seed, const MinimizeOptions& opts, std::size_t threads) {
  if (eps_list.empty()) throw InvalidParameter("eps_list", "must not be empty");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw InvalidParameter("eps_list", "must be strictly decreasing");

  SimSpec skeleton = spec;
  skeleton.params.sigma = 0.0;
  skeleton.noise.reset();
  LadderResult out;
  MinimizeOptions mopts = opts;
  mopts.threads = threads;
  out.rate = minimize_rate(event, skeleton, mopts);

  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double eps = eps_list[i];
    const bool rare = std::exp(-out.rate.I_star / eps) < 1e-3;
    std::optional<CameronMartinControl> tilt;
    if (rare && out.rate.status != RateStatus::Infeasible) tilt = out.rate.h_star;
    LadderRow row = mc_tail_probability(event, spec, eps, n_samples, stream_seed(seed, i), tilt,
                                        threads);
    row.I_star = out.rate.I_star;
    out.rows.push_back(row);
  }
  out.monotone = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (!(out.rows[i].neg_eps_log_p < out.rows[i - 1].neg_eps_log_p)) out.monotone = false;
  return out;
}

std::vector<WeakRow> weak_convergence_experiment(const SimSpec& spec,
                                                 const std::vector<std::size_t>& n_list) {
  if (spec.params.sigma != 0.0) throw InvalidParameter("sigma", "must be 0 for skeleton runs");
  SimSpec base = spec;
  base.noise.reset();
  base.control.reset();
  base.save_every = 1;
  const std::size_t steps = step_count(base);
  if (steps == 0) throw InvalidSpec("dt must divide the horizon");
  const Trajectory reference = simulate(base);

  std::vector<WeakRow> rows;
  for (std::size_t n : n_list) {
    if (n == 0) throw InvalidParameter("n_list", "entries must be >= 1");
    const double w = 2.0 * std::numbers::pi * static_cast<double>(n);
    SimSpec s = base;
    s.control = control_from_antiderivative([w](double t) { return (1.0 - std::cos(w * t)) / w; },
                                            steps, base.horizon);
    rows.push_back({n, sup_distance(simulate(s), reference), s.control->norm_h()});
  }
  return rows;
}

void write_ladder_csv(const std::vector<LadderRow>& rows, std::ostream& out) {
  out << "epsilon,p_hat,ci,neg_eps_log_p,method,I_star\n";
  for (const auto& r : rows)
    csv_row(out, {fmt17(r.epsilon), fmt17(r.p_hat), fmt17(r.ci_halfwidth), fmt17(r.neg_eps_log_p),
                  to_string(r.method), fmt17(r.I_star)});
}

void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& out) {
  out << "stage,iteration,mu,objective,rate,gap,grad_norm\n";
  for (const auto& r : trace)
    csv_row(out, {std::to_string(r.stage), std::to_string(r.iteration), fmt17(r.mu),
                  fmt17(r.objective), fmt17(r.rate), fmt17(r.gap), fmt17(r.grad_norm)});
}

void write_weak_csv(const std::vector<WeakRow>& rows, std::ostream& out) {
  out << "n,distance,norm_h\n";
  for (const auto& r : rows)
    csv_row(out, {std::to_string(r.n), fmt17(r.distance), fmt17(r.norm_h)});
}

}  // namespace gmlab
