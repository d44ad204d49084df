#include <CLI11.hpp>

#include <iostream>

#include "gmlab/errors.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Shadow activator-inhibitor experiment runner", "gm_lab"};
  app.set_version_flag("--version", GMLAB_VERSION);
  app.require_subcommand(1);

  gmlab::cli::RunOptions opts;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t threads = 0;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", opts.config_path, "key=value config file")->required();
  auto* seed_opt = run->add_option("--seed-override", seed, "Replace seeds.master");
  auto* out_opt = run->add_option("--out", out, "Replace output.dir");
  auto* threads_opt =
      run->add_option("--threads", threads, "Worker threads (default $GM_LAB_THREADS or all cores)")
          ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : gmlab::cli::kError;
  }
  if (*seed_opt) opts.seed_override = seed;
  if (*out_opt) opts.out_dir = out;
  if (*threads_opt) opts.threads = threads;

  try {
    return gmlab::cli::run(opts, std::cout);
  } catch (const gmlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return gmlab::cli::kError;
}
