// hpfact: batch runner for the kernel checks, the factorization iteration,
// the commutator comparison and the approximation decay table.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hpfact/commands.hpp"
#include "hpfact/parallel.hpp"

int main(int argc, char** argv) {
  using namespace hpfact;
  CLI::App app{"Weak factorization experiments on a uniform grid"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 1;
  app.add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  auto* out_opt = app.add_option("--out", out_dir, "output directory, overrides out_dir");
  app.add_option("--threads", threads, "worker threads (speed only)")->check(CLI::Range(1, 1024));

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const ExperimentConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"verify-kernel", "size, smoothness and homogeneity checks", cmd_verify_kernel},
      {"factorize", "single-atom weak factorization and decay CSV", cmd_factorize},
      {"commutator", "commutator estimate against the Lip seminorm", cmd_commutator},
      {"decay-table", "approximation error against N", cmd_decay_table},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.out_dir = out_dir;
    set_thread_count(threads);
    for (const auto& c : commands)
      if (app.got_subcommand(c.name)) return c.run(cfg, std::cout);
  } catch (const config_error& e) {
    std::cerr << (e.usage ? "usage error: " : "invalid config: ") << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
