// thermoprep: run experiment configs and canned validation suites.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thermoprep/errors.hpp"
#include "thermoprep/harness/config.hpp"
#include "thermoprep/harness/experiment.hpp"
#include "thermoprep/validation/suites.hpp"

namespace {

using namespace thermoprep;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out_dir;
  std::optional<std::string> cost_mode;
  std::optional<int> max_qubits;
};

int run_command(const std::string& path, const Overrides& o) {
  harness::ExperimentConfig config;
  try {
    config = harness::load_config(path);
    if (o.seed) config.run.seed = *o.seed;
    if (o.trials) config.run.trials = *o.trials;
    if (o.out_dir) config.output.directory = *o.out_dir;
    if (o.cost_mode) config.run.cost_mode = harness::parse_cost_mode(*o.cost_mode);
    if (o.max_qubits) config.run.max_qubits = *o.max_qubits;
    config.validate();
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return harness::kExitConfigError;
  }
  return harness::run_experiment(config, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive thermal-state preparation simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--seed", o.seed, "Override run.seed");
  app.add_option("--trials", o.trials, "Override run.trials");
  app.add_option("--out-dir", o.out_dir, "Override the output directory");
  app.add_option("--cost-mode", o.cost_mode, "Override run.cost_mode")
      ->check(CLI::IsMember({"faithful", "single-pass"}));
  app.add_option("--max-qubits", o.max_qubits, "Override the Hilbert-space cap (log2 of the dimension)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Path to a JSON experiment config")->required();

  std::string suite_name;
  auto* suite = app.add_subcommand("suite", "Run a canned validation suite");
  suite->add_option("name", suite_name, "Suite name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : harness::kExitConfigError;
  }

  try {
    if (*run) return run_command(config_path, o);
    return validation::run_suite(suite_name, o.out_dir.value_or("suite_out"), std::cout);
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return harness::kExitResourceCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return harness::kExitFailedCriterion;
  }
}
