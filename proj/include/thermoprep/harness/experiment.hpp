#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermoprep/harness/config.hpp"
#include "thermoprep/merge_engine.hpp"

namespace thermoprep::harness {

/// Per-trial CSV header; one row per (trial, level), levels 1..K.
inline constexpr const char* kTrialCsvHeader =
    "trial,level,blocks_built,merge_attempts,failures,steps_attempted,charged_time";

inline constexpr int kSummarySchemaVersion = 1;

struct ExperimentResult {
  ChainPlan plan;
  std::vector<CostReport> trials;  // ordered by trial id
  double trace_distance = 0.0;     // final state vs exact Gibbs
  std::string state_hash;
  nlohmann::json resolved;
  nlohmann::json summary;
  std::string trials_csv;
};

/// FNV-1a over the raw doubles of the matrix, as 16 hex digits.
std::string state_hash(const Matrix& m);

/// Runs `fn(i)` for i in [0, count) on `threads` workers. Exceptions are
/// rethrown on the calling thread (the one from the lowest index wins).
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Plans the chain, runs every trial and assembles the artifacts in memory.
/// Throws ConfigError, ResourceError or core exceptions.
ExperimentResult execute_experiment(const ExperimentConfig& config);

/// CSV rows in the fixed column order, %.17g for reals.
std::string format_trials_csv(const std::vector<CostReport>& trials);

/// execute_experiment, then writes resolved_config.json, trials.csv and
/// summary.json into config.output.directory. Returns an ExitCode; messages
/// go to `log`.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace thermoprep::harness
