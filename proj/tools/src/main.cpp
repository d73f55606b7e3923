#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pbe/error.hpp"
#include "pbesolve/config.hpp"
#include "pbesolve/run.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Poisson-Boltzmann solver with 2-term and 3-term splittings"};
  std::string command, config_path, out_dir;
  std::uint64_t seed = 42;
  bool seed_given = false;
  int threads = 0;
  app.add_option("command", command, "surface | mesh | solve | verify | convergence | energy")
      ->required();
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_dir, "output directory (overrides run.output)");
  auto *seed_opt = app.add_option("--seed", seed, "RNG seed for randomized checks");
  app.add_option("--threads", threads, "worker threads (env PBESOLVE_THREADS)")
      ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pbesolve::kInputError;
  }
  seed_given = seed_opt->count() > 0;
  if (threads == 0) {
    if (const char *env = std::getenv("PBESOLVE_THREADS")) {
      try {
        threads = std::stoi(env);
      } catch (const std::exception &) {
        threads = 0;
      }
      if (threads < 1) {
        std::cerr << "error: PBESOLVE_THREADS must be a positive integer\n";
        return pbesolve::kInputError;
      }
    }
  }
  if (threads == 0)
    threads = 1;

  try {
    const pbesolve::Command cmd = pbesolve::command_from_string(command);
    pbesolve::RunConfig config = pbesolve::load_config_file(config_path);
    if (!out_dir.empty())
      config.output = out_dir;
    if (seed_given)
      config.seed = seed;
    std::cout << "pbesolve " << command << " (threads " << threads << ", seed " << config.seed
              << ")\n";
    return pbesolve::run(cmd, config, std::cout);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return pbesolve::exit_code_for(e);
  }
}
