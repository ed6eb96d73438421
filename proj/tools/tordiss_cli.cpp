#include "tordiss/error.hpp"
#include "tordiss/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace tordiss;

int main(int argc, char** argv) {
  CLI::App app{"Dissipation times of noisy torus maps"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  unsigned jobs = 0;

  const char* names[] = {"norms", "dissipation", "pseudospectrum", "correlations", "bounds", "sweep"};
  const char* help[] = {"operator norm curves", "dissipation times and rate fits", "pseudospectrum distances",
                        "correlation series", "bound sandwich checks", "dissipation sweep with bounds and fits"};
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--jobs", jobs, "worker threads (overrides run.jobs)")->check(CLI::PositiveNumber);
  }
  app.add_subcommand("selftest", "closed-form oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  auto* chosen = app.get_subcommands().front();
  auto cmd = *parse_subcommand(chosen->get_name());
  if (cmd == Subcommand::Selftest) {
    bool ok = true;
    for (const auto& c : run_selftest()) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
      if (!c.passed) std::cout << "  " << c.detail;
      std::cout << "\n";
      ok = ok && c.passed;
    }
    return ok ? kExitOk : kExitNumerical;
  }

  try {
    ExperimentConfig cfg = load_config(config_path);
    RunOptions opt;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    if (jobs) opt.jobs = jobs;
    RunResult r = run(cmd, cfg, opt, std::cout);
    for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedError& e) {
    std::cerr << "config error: unsupported: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << " (last estimate " << e.last_estimate() << ")\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
