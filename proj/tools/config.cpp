#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include "gmlab/errors.hpp"

namespace gmlab::cli {

namespace {

// Accepted keys and their defaults. An empty default means "unset".
const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"experiment", ""},
      {"model.p", "2"},
      {"model.q", "1"},
      {"model.alpha", "2"},
      {"model.beta", "0"},
      {"model.sigma", "0"},
      {"model.zeta", "1"},
      {"model.dim", "1"},
      {"model.length", "1"},
      {"grid.n", "64"},
      {"init.kind", "constant"},
      {"init.mean", "1"},
      {"init.amplitude", "0"},
      {"init.mode", "1"},
      {"sim.dt", "0.001"},
      {"sim.horizon", "1"},
      {"sim.save_every", "1"},
      {"sim.blowup_threshold", "1e8"},
      {"sim.delta", ""},
      {"sim.splitting", "lie"},
      {"sim.spectrum", "continuum"},
      {"sim.noise_substeps", "1"},
      {"control.kind", "none"},
      {"control.rate", "1"},
      {"control.n", "1"},
      {"control.intervals", "64"},
      {"seeds.master", "1"},
      {"seeds.count", "1"},
      {"output.dir", "out"},
      {"output.snapshots", "1"},
      {"picard.tol", "1e-10"},
      {"picard.max_iter", "50"},
      {"picard.dt_list", ""},
      {"bounds.delta", "0.5"},
      {"bounds.quad_c", "1"},
      {"bounds.energy_ell", ""},
      {"bounds.energy_rho", ""},
      {"blowup.levels", "1,2,4"},
      {"ldp.event", "terminal-xi"},
      {"ldp.threshold", "1"},
      {"ldp.direction", ">="},
      {"ldp.m", "64"},
      {"ldp.mu0", "10"},
      {"ldp.mu_factor", "10"},
      {"ldp.stages", "6"},
      {"ldp.eps_list", "0.5,0.25,0.125,0.0625"},
      {"ldp.samples", "10000"},
      {"weak.n_list", "1,2,4,8,16,32"},
      {"tail.x_grid", "0.5,1,1.5,2,2.5"},
      {"tail.paths", "100000"},
      {"tail.steps", "1000"},
      {"tail.horizon", "1"},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config::Config() {
  for (const auto& [k, v] : defaults()) entries_[k] = Entry{v, 0, false};
}

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "", "expected key=value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "", "empty key");
    auto it = cfg.entries_.find(key);
    if (it == cfg.entries_.end()) throw ConfigError(line, key, "unknown key");
    if (it->second.provided) throw ConfigError(line, key, "duplicate key");
    it->second = Entry{value, line, true};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open '" + path + "'");
  return parse(in);
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(0, key, "unknown key");
  it->second = Entry{value, 0, true};
}

bool Config::provided(const std::string& key) const { return entry(key).provided; }

const Config::Entry& Config::entry(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(0, key, "unknown key");
  return it->second;
}

const std::string& Config::str(const std::string& key) const { return entry(key).value; }

double Config::real(const std::string& key) const {
  const Entry& e = entry(key);
  double v = 0.0;
  const char* end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(e.line, key, "not a number: '" + e.value + "'");
  return v;
}

std::int64_t Config::integer(const std::string& key) const {
  const Entry& e = entry(key);
  std::int64_t v = 0;
  const char* end = e.value.data() + e.value.size();
  auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(e.line, key, "not an integer: '" + e.value + "'");
  return v;
}

std::size_t Config::count(const std::string& key) const {
  const std::int64_t v = integer(key);
  if (v < 0) throw ConfigError(entry(key).line, key, "must be >= 0");
  return static_cast<std::size_t>(v);
}

std::vector<double> Config::reals(const std::string& key) const {
  const Entry& e = entry(key);
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) {
    double v = 0.0;
    const char* end = item.data() + item.size();
    auto [ptr, ec] = std::from_chars(item.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(e.line, key, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> Config::counts(const std::string& key) const {
  const Entry& e = entry(key);
  std::vector<std::size_t> out;
  for (const auto& item : split_list(e.value)) {
    std::size_t v = 0;
    const char* end = item.data() + item.size();
    auto [ptr, ec] = std::from_chars(item.data(), end, v);
    if (ec != std::errc() || ptr != end)
      throw ConfigError(e.line, key, "not a count: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void Config::write_resolved(std::ostream& out) const {
  for (const auto& [k, e] : entries_) out << k << '=' << e.value << '\n';
}

}  // namespace gmlab::cli
