#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermoprep/hamiltonian_models.hpp"
#include "thermoprep/merge_engine.hpp"

namespace thermoprep::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailedCriterion = 1,
  kExitConfigError = 2,
  kExitResourceCap = 3,
  kExitIoError = 4,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::string name = "ising";  // ising | heisenberg | random
  std::size_t sites = 1;
  Index local_dim = 2;
  std::map<std::string, double> couplings;
  std::uint64_t seed = 0;  // random model only
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  CostMode cost_mode = CostMode::single_pass;
  int max_qubits = 10;
  std::size_t threads = 1;
};

struct OutputConfig {
  std::filesystem::path directory = "results";
  std::vector<std::string> formats = {"csv", "json"};

  bool wants(const std::string& format) const;
};

struct ExperimentConfig {
  ModelConfig model;
  double beta = 1.0;
  std::optional<double> eps_bar;
  std::optional<double> eps;
  FidelitySettings fidelity;
  RunConfig run;
  OutputConfig output;

  /// Throws ConfigError on any inconsistency. Does not check the resource cap.
  void validate() const;
  Index max_dim() const;
  PrepareOptions prepare_options() const;
};

/// Parses a config tree; unknown keys anywhere raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& tree);
ExperimentConfig load_config(const std::filesystem::path& path);

ChainModel build_model(const ModelConfig& model);

const char* to_string(CostMode mode);
CostMode parse_cost_mode(const std::string& text);
const char* to_string(FidelityMode mode);

/// The config with every derived default filled in from the schedule.
nlohmann::json resolved_config(const ExperimentConfig& config, const MergeSchedule& schedule);

}  // namespace thermoprep::harness
