#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace santalo {

struct RunOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides every per-scenario seed
  int workers = 0;                    // 0 keeps the runtime default
  bool machine = false;               // files only, no human chatter on out
};

// Runs every scenario in the JSON config, writes report.json / report.csv
// and per-scenario artifact CSVs under out_dir. Exit code semantics:
//   0  every check passed
//   1  at least one check failed (or a scenario aborted mid-run)
//   2  the config itself is unusable (parse error, unknown id/mode/rule)
int run_scenarios(const RunOptions& options, std::ostream& out, std::ostream& err);

// Catalog listing for the CLI: potential grammar, bodies, modes, rules.
void print_catalog(std::ostream& out);

}  // namespace santalo
