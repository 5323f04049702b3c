#include <cstdint>
#include <iostream>

#include "CLI11.hpp"
#include "santalo/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for property (tau) and the functional Santalo inequality"};
  app.require_subcommand(1);

  santalo::RunOptions opt;
  std::uint64_t seed_value = 0;

  CLI::App* run = app.add_subcommand("run", "run scenarios from a JSON config");
  run->add_option("--config", opt.config_path, "scenario config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", opt.out_dir, "output directory [out]");
  CLI::Option* seed_opt = run->add_option("--seed", seed_value, "override every scenario seed");
  run->add_option("--workers", opt.workers, "worker threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--machine", opt.machine, "no human-readable output, files only");

  CLI::App* list = app.add_subcommand("list", "list catalog entries and config grammar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a config error
  }

  if (list->parsed()) {
    santalo::print_catalog(std::cout);
    return 0;
  }
  if (seed_opt->count() > 0) opt.seed = seed_value;
  return santalo::run_scenarios(opt, std::cout, std::cerr);
}
