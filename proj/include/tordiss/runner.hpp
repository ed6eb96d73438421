#pragma once

#include "tordiss/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tordiss {

enum class Subcommand { Norms, Dissipation, Pseudospectrum, Correlations, Bounds, Sweep, Selftest };
std::optional<Subcommand> parse_subcommand(const std::string& name);
std::string to_string(Subcommand s);

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitViolation = 4 };

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides output.dir
  std::optional<unsigned> jobs;        // overrides run.jobs
};

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;
  std::vector<double> violating_eps;
};

// Runs one subcommand over the config, writes artifacts and prints a summary to `out`.
// Configuration and numerical errors propagate as exceptions.
RunResult run(Subcommand cmd, const ExperimentConfig& config, const RunOptions& options, std::ostream& out);

struct SelftestCase {
  std::string name;
  bool passed = false;
  std::string detail;
};
std::vector<SelftestCase> run_selftest();

}  // namespace tordiss
