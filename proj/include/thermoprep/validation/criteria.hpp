#pragma once

// Property checks at desk scale. Each returns its data table alongside the
// verdict so suites can emit plot-ready CSV.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace thermoprep::validation {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double runtime_seconds = 0.0;
  double runtime_limit_seconds = 0.0;  // 0: no limit
  Table table;
  nlohmann::json metrics = nlohmann::json::object();

  std::string summary_line() const;
  nlohmann::json to_json() const;
};

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

CriterionResult dyson_identity(const std::vector<std::uint64_t>& seeds);
CriterionResult dyson_identity();  // seeds 1..25
CriterionResult second_order_step();
CriterionResult success_probability_bound();
CriterionResult end_to_end_chain();
CriterionResult dephasing_convergence();
CriterionResult imperfect_pe_bound();
CriterionResult binned_hamiltonian_bound();
CriterionResult restart_recursion();
CriterionResult cost_scaling();
/// Runs the same faithful config twice (and once more on several threads)
/// under `scratch` and compares the per-trial CSV bytes.
CriterionResult determinism(const std::filesystem::path& scratch);

/// Every criterion in id order.
std::vector<CriterionResult> run_all(const std::filesystem::path& scratch);

}  // namespace thermoprep::validation
