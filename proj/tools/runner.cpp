#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

#include "config.hpp"
#include "gmlab/bounds.hpp"
#include "gmlab/csv.hpp"
#include "gmlab/errors.hpp"
#include "gmlab/ldp.hpp"
#include "gmlab/parallel.hpp"
#include "gmlab/rng.hpp"
#include "gmlab/simulate.hpp"

namespace gmlab::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
  Config cfg;
  fs::path out;
  std::size_t threads = 1;
  std::uint64_t master = 1;
  std::ostream& log;
};

std::ofstream open_out(const Context& ctx, const std::string& name) {
  std::ofstream f(ctx.out / name, std::ios::binary);
  if (!f) throw Error("cannot write " + (ctx.out / name).string());
  return f;
}

ModelParams model_from(const Config& cfg) {
  RawParams raw;
  raw.p = cfg.real("model.p");
  raw.q = cfg.real("model.q");
  raw.alpha = cfg.real("model.alpha");
  raw.beta = cfg.real("model.beta");
  raw.sigma = cfg.real("model.sigma");
  raw.zeta = cfg.real("model.zeta");
  raw.dim = static_cast<int>(cfg.integer("model.dim"));
  raw.domain_length = cfg.real("model.length");
  try {
    return validate_params(raw);
  } catch (const InvalidParameter& e) {
    const std::string key = e.field() == "domain_length" ? "model.length" : "model." + e.field();
    throw ConfigError(0, key, e.what());
  }
}

Field initial_field(const Config& cfg, const Grid& grid, std::optional<double> level = {}) {
  const std::string& kind = cfg.str("init.kind");
  const double mean = level.value_or(cfg.real("init.mean"));
  if (kind == "zero") return constant_field(grid, 0.0);
  if (kind == "constant") return constant_field(grid, mean);
  if (kind == "cosine") {
    const double amp = cfg.real("init.amplitude");
    const double k = static_cast<double>(cfg.count("init.mode")) * std::numbers::pi / grid.length();
    return sample_field(grid, [=](double x, double) { return mean + amp * std::cos(k * x); });
  }
  throw ConfigError(0, "init.kind", "expected zero, constant or cosine");
}

std::optional<CameronMartinControl> control_from(const Config& cfg, double horizon) {
  const std::string& kind = cfg.str("control.kind");
  const std::size_t m = cfg.count("control.intervals");
  if (kind == "none") return std::nullopt;
  if (kind == "constant") return constant_control(cfg.real("control.rate"), m, horizon);
  if (kind == "sine") {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(cfg.count("control.n"));
    return control_from_antiderivative([w](double t) { return (1.0 - std::cos(w * t)) / w; }, m,
                                       horizon);
  }
  throw ConfigError(0, "control.kind", "expected none, constant or sine");
}

SimSpec spec_from(const Config& cfg) {
  SimSpec spec;
  spec.params = model_from(cfg);
  spec.grid = make_grid(cfg.count("grid.n"), spec.params.dim, spec.params.domain_length);
  spec.v0 = initial_field(cfg, spec.grid);
  spec.dt = cfg.real("sim.dt");
  spec.horizon = cfg.real("sim.horizon");
  spec.save_every = cfg.count("sim.save_every");
  spec.blowup_threshold = cfg.real("sim.blowup_threshold");
  if (!cfg.str("sim.delta").empty()) spec.delta = cfg.real("sim.delta");
  const std::string& split = cfg.str("sim.splitting");
  if (split == "lie") spec.splitting = Splitting::Lie;
  else if (split == "strang") spec.splitting = Splitting::Strang;
  else throw ConfigError(0, "sim.splitting", "expected lie or strang");
  const std::string& spectrum = cfg.str("sim.spectrum");
  if (spectrum == "continuum") spec.spectrum = Spectrum::Continuum;
  else if (spectrum == "lattice") spec.spectrum = Spectrum::Lattice;
  else throw ConfigError(0, "sim.spectrum", "expected continuum or lattice");
  spec.control = control_from(cfg, spec.horizon);
  return spec;
}

BrownianPath noise_for(const Context& ctx, const SimSpec& spec, std::size_t index) {
  const std::size_t sub = std::max<std::size_t>(1, ctx.cfg.count("sim.noise_substeps"));
  return sample_brownian(step_count(spec) * sub, spec.horizon, stream_seed(ctx.master, index));
}

EventSpec event_from(const Config& cfg) {
  EventSpec e;
  e.observable = parse_observable(cfg.str("ldp.event"));
  e.threshold = cfg.real("ldp.threshold");
  e.direction = parse_direction(cfg.str("ldp.direction"));
  return e;
}

MinimizeOptions minimize_from(const Context& ctx) {
  MinimizeOptions o;
  o.m_intervals = ctx.cfg.count("ldp.m");
  o.mu0 = ctx.cfg.real("ldp.mu0");
  o.mu_factor = ctx.cfg.real("ldp.mu_factor");
  o.stages = ctx.cfg.count("ldp.stages");
  o.threads = ctx.threads;
  return o;
}

int run_simulate(Context& ctx) {
  SimSpec spec = spec_from(ctx.cfg);
  const std::size_t count = std::max<std::size_t>(1, ctx.cfg.count("seeds.count"));
  std::vector<Trajectory> runs(count);
  parallel_for(count, ctx.threads, [&](std::size_t i) {
    SimSpec s = spec;
    if (s.params.sigma > 0.0) s.noise = noise_for(ctx, spec, i);
    runs[i] = simulate(s);
  });
  for (std::size_t i = 0; i < count; ++i) {
    auto csv = open_out(ctx, "trajectory_" + std::to_string(i) + ".csv");
    write_trajectory_csv(runs[i], csv);
    if (ctx.cfg.count("output.snapshots") != 0) {
      auto bin = open_out(ctx, "snapshots_" + std::to_string(i) + ".bin");
      write_field_snapshots(runs[i], bin);
    }
    ctx.log << "run " << i << ": t=" << runs[i].final_time() << " xi=" << runs[i].xi_series.back();
    if (runs[i].blowup_time) ctx.log << " blow-up at t=" << *runs[i].blowup_time;
    ctx.log << '\n';
  }
  return kOk;
}

int run_picard_check(Context& ctx) {
  SimSpec spec = spec_from(ctx.cfg);
  std::vector<double> dts = ctx.cfg.reals("picard.dt_list");
  if (dts.empty()) dts.push_back(spec.dt);
  const double tol = ctx.cfg.real("picard.tol");
  const std::size_t max_iter = ctx.cfg.count("picard.max_iter");
  std::optional<BrownianPath> path;
  if (spec.params.sigma > 0.0) {
    SimSpec finest = spec;
    finest.dt = *std::min_element(dts.begin(), dts.end());
    path = noise_for(ctx, finest, 0);
  }
  auto compare = open_out(ctx, "picard_compare.csv");
  auto iterates = open_out(ctx, "picard_iterates.csv");
  compare << "dt,sup_distance,iterations,last_distance\n";
  iterates << "dt,iteration,distance\n";
  for (double dt : dts) {
    SimSpec s = spec;
    s.dt = dt;
    s.noise = path;
    const PicardResult pic = picard_solve(s, tol, max_iter);
    const double d = sup_distance(pic.trajectory, simulate(s));
    csv_row(compare, {fmt17(dt), fmt17(d), std::to_string(pic.iterations),
                      fmt17(pic.distances.back())});
    for (std::size_t k = 0; k < pic.distances.size(); ++k)
      csv_row(iterates, {fmt17(dt), std::to_string(k + 1), fmt17(pic.distances[k])});
    ctx.log << "dt=" << dt << " picard iterations=" << pic.iterations << " sup distance=" << d
            << '\n';
  }
  return kOk;
}

int run_bounds_ensemble(Context& ctx) {
  const SimSpec spec = spec_from(ctx.cfg);
  std::vector<BoundReport> reports;
  const double delta = ctx.cfg.real("bounds.delta");
  if (spec.control && spec.params.sigma == 0.0) {
    reports = check_skeleton_bounds(simulate(spec), *spec.control, delta, 0,
                                    ctx.cfg.real("bounds.quad_c"));
  } else {
    EnsembleOptions opts;
    opts.n_paths = std::max<std::size_t>(1, ctx.cfg.count("seeds.count"));
    opts.master_seed = ctx.master;
    opts.threads = ctx.threads;
    opts.noise_substeps = std::max<std::size_t>(1, ctx.cfg.count("sim.noise_substeps"));
    opts.delta = delta;
    opts.quad_c = ctx.cfg.real("bounds.quad_c");
    if (!ctx.cfg.str("bounds.energy_ell").empty()) opts.energy_ell = ctx.cfg.real("bounds.energy_ell");
    if (!ctx.cfg.str("bounds.energy_rho").empty()) opts.energy_rho = ctx.cfg.real("bounds.energy_rho");
    reports = gmlab::run_bounds_ensemble(spec, opts);
  }
  const auto summary = summarize(reports, spec.dt);
  auto s = open_out(ctx, "bounds_summary.csv");
  write_summary_csv(summary, s);
  auto r = open_out(ctx, "bounds_reports.csv");
  write_reports_csv(reports, r);
  bool failed = false;
  for (const auto& row : summary) {
    ctx.log << row.name << ": " << row.n_pass << "/" << row.n_paths << " pass, worst margin "
            << row.worst_margin << '\n';
    if (row.hard && row.n_pass != row.n_paths) failed = true;
  }
  return failed ? kBoundFailure : kOk;
}

int run_blowup_scan(Context& ctx) {
  const SimSpec spec = spec_from(ctx.cfg);
  const std::vector<double> levels = ctx.cfg.reals("blowup.levels");
  if (levels.empty()) throw ConfigError(0, "blowup.levels", "need at least one level");
  std::vector<std::optional<BlowupEvent>> events(levels.size());
  parallel_for(levels.size(), ctx.threads, [&](std::size_t i) {
    SimSpec s = spec;
    s.v0 = constant_field(s.grid, levels[i]);
    s.save_every = step_count(s);
    if (s.params.sigma > 0.0) s.noise = noise_for(ctx, spec, i);
    events[i] = detect_blowup(simulate(s));
  });
  auto out = open_out(ctx, "blowup.csv");
  out << "level,blowup,time,sup_norm\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& e = events[i];
    csv_row(out, {fmt17(levels[i]), e ? "1" : "0", e ? fmt17(e->time) : "",
                  e ? fmt17(e->sup_norm) : ""});
    ctx.log << "level " << levels[i] << ": "
            << (e ? "blow-up at t=" + std::to_string(e->time) : std::string("no blow-up")) << '\n';
  }
  return kOk;
}

int run_ldp_minimize(Context& ctx) {
  SimSpec spec = spec_from(ctx.cfg);
  spec.params.sigma = 0.0;
  spec.control.reset();
  const RateResult res = minimize_rate(event_from(ctx.cfg), spec, minimize_from(ctx));
  auto rate = open_out(ctx, "rate.csv");
  rate << "I_star,status,iterations,final_gap,norm_h\n";
  csv_row(rate, {fmt17(res.I_star), to_string(res.status), std::to_string(res.iterations),
                 fmt17(res.final_gap), fmt17(res.h_star.norm_h())});
  auto control = open_out(ctx, "control.csv");
  control << "t,hdot\n";
  for (std::size_t i = 0; i < res.h_star.intervals(); ++i)
    csv_row(control, {fmt17(static_cast<double>(i) * res.h_star.dt_h()), fmt17(res.h_star.hdot()[i])});
  auto trace = open_out(ctx, "trace.csv");
  write_trace_csv(res.trace, trace);
  ctx.log << "I* = " << res.I_star << " (" << to_string(res.status) << ", " << res.iterations
          << " iterations)\n";
  return kOk;
}

int run_ldp_ladder(Context& ctx) {
  const SimSpec spec = spec_from(ctx.cfg);
  const LadderResult res =
      ldp_ladder(event_from(ctx.cfg), spec, ctx.cfg.reals("ldp.eps_list"),
                 ctx.cfg.count("ldp.samples"), ctx.master, minimize_from(ctx), ctx.threads);
  auto out = open_out(ctx, "ladder.csv");
  write_ladder_csv(res.rows, out);
  auto trace = open_out(ctx, "trace.csv");
  write_trace_csv(res.rate.trace, trace);
  for (const auto& r : res.rows)
    ctx.log << "eps=" << r.epsilon << " p=" << r.p_hat << " +- " << r.ci_halfwidth
            << " -eps log p=" << r.neg_eps_log_p << " (" << to_string(r.method) << ")\n";
  ctx.log << "I* = " << res.rate.I_star << ", monotone: " << (res.monotone ? "yes" : "no") << '\n';
  return kOk;
}

int run_weak_convergence(Context& ctx) {
  SimSpec spec = spec_from(ctx.cfg);
  spec.control.reset();
  const auto rows = weak_convergence_experiment(spec, ctx.cfg.counts("weak.n_list"));
  auto out = open_out(ctx, "weak.csv");
  write_weak_csv(rows, out);
  for (const auto& r : rows) ctx.log << "n=" << r.n << " d_n=" << r.distance << '\n';
  return kOk;
}

int run_noise_tail_check(Context& ctx) {
  const auto grid = ctx.cfg.reals("tail.x_grid");
  const TailReport rep = sup_tail_check(ctx.cfg.count("tail.paths"), ctx.cfg.real("tail.horizon"),
                                        grid, ctx.master, ctx.cfg.count("tail.steps"), ctx.threads);
  auto out = open_out(ctx, "tail.csv");
  out << "x,empirical_tail,bound,tail_estimate,std_error,pass\n";
  for (const auto& r : rep.rows) {
    csv_row(out, {fmt17(r.x), fmt17(r.empirical_tail), fmt17(r.bound), fmt17(r.tail_estimate),
                  fmt17(r.std_error), r.pass ? "1" : "0"});
    ctx.log << "x=" << r.x << " P(B*>x)=" << r.empirical_tail << " bound=" << r.bound
            << (r.pass ? "" : "  FAIL") << '\n';
  }
  return rep.pass ? kOk : kBoundFailure;
}

void write_manifest(const Context& ctx) {
  auto out = open_out(ctx, "manifest.txt");
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "version=" << GMLAB_VERSION << '\n';
  out << "created=" << stamp << '\n';
  out << "threads=" << ctx.threads << '\n';
  const std::string& exp = ctx.cfg.str("experiment");
  if (exp == "ldp-ladder")
    out << "note=each ladder row sets the noise amplitude sigma = sqrt(epsilon)\n";
  if (exp == "ldp-minimize")
    out << "note=rate minimisation runs the noise-free controlled system (sigma = 0)\n";
  ctx.cfg.write_resolved(out);
}

}  // namespace

int run(const RunOptions& options, std::ostream& log) {
  Config cfg = Config::load(options.config_path);
  if (options.seed_override) cfg.set("seeds.master", std::to_string(*options.seed_override));
  if (options.out_dir) cfg.set("output.dir", *options.out_dir);
  const std::string experiment = cfg.str("experiment");
  if (experiment.empty()) throw ConfigError(0, "experiment", "missing");

  Context ctx{cfg, fs::path(cfg.str("output.dir")), resolve_threads(options.threads),
              static_cast<std::uint64_t>(cfg.integer("seeds.master")), log};

  using Handler = int (*)(Context&);
  static const std::vector<std::pair<std::string, Handler>> handlers = {
      {"simulate", &run_simulate},
      {"picard-check", &run_picard_check},
      {"bounds-ensemble", &run_bounds_ensemble},
      {"blowup-scan", &run_blowup_scan},
      {"ldp-minimize", &run_ldp_minimize},
      {"ldp-ladder", &run_ldp_ladder},
      {"weak-convergence", &run_weak_convergence},
      {"noise-tail-check", &run_noise_tail_check},
  };
  for (const auto& [name, handler] : handlers) {
    if (name != experiment) continue;
    fs::create_directories(ctx.out);
    write_manifest(ctx);
    log << "experiment " << name << " -> " << ctx.out.string() << '\n';
    return handler(ctx);
  }
  throw ConfigError(0, "experiment", "unknown experiment '" + experiment + "'");
}

}  // namespace gmlab::cli
