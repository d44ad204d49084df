#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "gmlab/errors.hpp"
#include "runner.hpp"

namespace fs = std::filesystem;
using gmlab::ConfigError;
using gmlab::cli::Config;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(testing::TempDir()) / ("gmlab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "run.cfg";
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int run_in_process(const fs::path& cfg, const fs::path& out) {
  gmlab::cli::RunOptions opts;
  opts.config_path = cfg.string();
  opts.out_dir = out.string();
  std::ostringstream log;
  return gmlab::cli::run(opts, log);
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(GM_LAB_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsAndTypedAccess) {
  std::istringstream in("# comment\n\nexperiment = simulate\nmodel.sigma=0.5  # trailing\nldp.eps_list=0.5, 0.25\n");
  const Config cfg = Config::parse(in);
  EXPECT_EQ(cfg.str("experiment"), "simulate");
  EXPECT_DOUBLE_EQ(cfg.real("model.sigma"), 0.5);
  EXPECT_DOUBLE_EQ(cfg.real("model.p"), 2.0);
  EXPECT_FALSE(cfg.provided("model.p"));
  EXPECT_TRUE(cfg.provided("model.sigma"));
  EXPECT_EQ(cfg.reals("ldp.eps_list"), (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(cfg.count("grid.n"), 64u);
}

TEST(Config, UnknownKeyReportsLine) {
  std::istringstream in("experiment=simulate\nmodel.p=2\nmodel.gamma=3\n");
  try {
    Config::parse(in);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.key(), "model.gamma");
  }
}

TEST(Config, MalformedAndDuplicateLines) {
  std::istringstream missing_eq("experiment=simulate\nmodel.p 2\n");
  try {
    Config::parse(missing_eq);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream dup("model.p=2\nmodel.p=3\n");
  EXPECT_THROW(Config::parse(dup), ConfigError);
  std::istringstream bad_number("model.p=two\n");
  const Config cfg = Config::parse(bad_number);
  try {
    cfg.real("model.p");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(Config::load("/nonexistent/run.cfg"), ConfigError);
}

TEST(Config, ResolvedOutputIsSortedAndReparses) {
  std::istringstream in("seeds.master=9\nexperiment=simulate\n");
  Config cfg = Config::parse(in);
  cfg.set("grid.n", "16");
  EXPECT_THROW(cfg.set("nope", "1"), ConfigError);
  std::ostringstream out;
  cfg.write_resolved(out);
  std::istringstream back(out.str());
  const Config again = Config::parse(back);
  EXPECT_EQ(again.count("grid.n"), 16u);
  EXPECT_EQ(again.integer("seeds.master"), 9);
  EXPECT_EQ(out.str().substr(0, out.str().find('=')), "blowup.levels");
}

TEST(Runner, SimulateOutputsAreByteIdenticalAcrossRuns) {
  const fs::path dir = scratch("simulate");
  const fs::path cfg = write_config(dir,
                                    "experiment=simulate\nmodel.sigma=1\ngrid.n=16\ninit.kind=cosine\n"
                                    "init.amplitude=0.5\nsim.horizon=0.2\nseeds.count=2\n");
  ASSERT_EQ(run_in_process(cfg, dir / "a"), gmlab::cli::kOk);
  ASSERT_EQ(run_in_process(cfg, dir / "b"), gmlab::cli::kOk);
  for (const char* name : {"trajectory_0.csv", "trajectory_1.csv", "snapshots_0.bin"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / name)) << name;
    EXPECT_EQ(slurp(dir / "a" / name), slurp(dir / "b" / name)) << name;
  }
  EXPECT_NE(slurp(dir / "a" / "trajectory_0.csv"), slurp(dir / "a" / "trajectory_1.csv"));
  const auto rows = read_csv(dir / "a" / "trajectory_0.csv");
  EXPECT_EQ(rows.size(), 202u);
}

TEST(Runner, ManifestRecordsResolvedConfig) {
  const fs::path dir = scratch("manifest");
  const fs::path cfg = write_config(dir, "experiment=simulate\ngrid.n=8\nsim.horizon=0.01\n");
  ASSERT_EQ(run_in_process(cfg, dir / "out"), gmlab::cli::kOk);
  const std::string manifest = slurp(dir / "out" / "manifest.txt");
  EXPECT_EQ(manifest.rfind("version=", 0), 0u);
  EXPECT_NE(manifest.find("\nthreads="), std::string::npos);
  EXPECT_NE(manifest.find("\nexperiment=simulate\n"), std::string::npos);
  EXPECT_NE(manifest.find("\ngrid.n=8\n"), std::string::npos);
}

TEST(Runner, BoundsEnsembleAllSeedsPass) {
  const fs::path dir = scratch("bounds");
  const fs::path cfg = write_config(dir,
                                    "experiment=bounds-ensemble\nmodel.sigma=1\ngrid.n=64\n"
                                    "init.kind=cosine\ninit.amplitude=0.5\nseeds.count=100\n");
  ASSERT_EQ(run_in_process(cfg, dir / "out"), gmlab::cli::kOk);
  const auto rows = read_csv(dir / "out" / "bounds_summary.csv");
  ASSERT_GE(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"name", "n_paths", "n_pass", "worst_margin", "dt"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][1], "100") << rows[i][0];
    EXPECT_EQ(rows[i][2], "100") << rows[i][0];
  }
}

TEST(Runner, LdpMinimizeFindsUnitRateControl) {
  const fs::path dir = scratch("ldp");
  const fs::path cfg = write_config(dir,
                                    "experiment=ldp-minimize\ninit.kind=zero\ngrid.n=16\n"
                                    "sim.dt=0.0015625\nldp.threshold=1\n");
  ASSERT_EQ(run_in_process(cfg, dir / "out"), gmlab::cli::kOk);
  const auto rate = read_csv(dir / "out" / "rate.csv");
  ASSERT_EQ(rate.size(), 2u);
  EXPECT_NEAR(std::stod(rate[1][0]), 0.5, 1e-4);
  EXPECT_EQ(rate[1][1], "converged");
  EXPECT_EQ(read_csv(dir / "out" / "control.csv").size(), 65u);
  EXPECT_NE(slurp(dir / "out" / "manifest.txt").find("note="), std::string::npos);
}

TEST(Runner, UnknownExperimentIsAConfigError) {
  const fs::path dir = scratch("unknown");
  const fs::path cfg = write_config(dir, "experiment=bake-bread\n");
  EXPECT_THROW(run_in_process(cfg, dir / "out"), ConfigError);
}

TEST(Binary, ExitCodes) {
  const fs::path dir = scratch("binary");
  const fs::path ok = write_config(dir, "experiment=simulate\ngrid.n=8\nsim.horizon=0.01\n");
  EXPECT_EQ(run_binary("run " + ok.string() + " --out " + (dir / "ok").string()), 0);

  const fs::path bad = dir / "bad.cfg";
  std::ofstream(bad) << "experiment=simulate\nmodel.p=\n";
  EXPECT_EQ(run_binary("run " + bad.string() + " --out " + (dir / "bad").string()), 1);
  EXPECT_EQ(run_binary("run " + (dir / "missing.cfg").string()), 1);
  EXPECT_EQ(run_binary("frobnicate"), 1);

  // A blowing-up ensemble fails its hard no-blowup check.
  const fs::path blow = dir / "blow.cfg";
  std::ofstream(blow) << "experiment=bounds-ensemble\nmodel.p=5\nmodel.alpha=1\nmodel.sigma=1\n"
                         "grid.n=8\ninit.mean=3\nsim.dt=0.0001\nsim.horizon=0.1\nseeds.count=2\n";
  EXPECT_EQ(run_binary("run " + blow.string() + " --out " + (dir / "blow").string() + " --seed-override 4"), 2);
}
