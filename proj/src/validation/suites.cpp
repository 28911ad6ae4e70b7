#include "thermoprep/validation/suites.hpp"

#include <cstdio>
#include <functional>
#include <map>

#include <json.hpp>

#include "thermoprep/cost_model.hpp"
#include "thermoprep/harness/config.hpp"
#include "thermoprep/harness/experiment.hpp"
#include "thermoprep/validation/criteria.hpp"

namespace thermoprep::validation {

using nlohmann::json;

namespace {

// Dominant-term predictors for D = 1, 2, 3; passes when they grow with D.
CriterionResult d_dim_predict() {
  CriterionResult r;
  r.name = "d-dim-predict";
  r.table.columns = {"dimension", "sites", "beta", "h_norm", "eps_bar", "prediction", "one_d_total_time"};
  const double sites = 4.0, beta = 1.0, h_norm = 1.0, eps_bar = 0.1;
  const double one_d = total_time_prediction(sites, beta, h_norm, eps_bar);
  std::vector<double> values;
  for (int d = 1; d <= 3; ++d) {
    values.push_back(d_dim_prediction(sites, d, beta, h_norm, eps_bar));
    r.table.rows.push_back({static_cast<double>(d), sites, beta, h_norm, eps_bar, values.back(), one_d});
  }
  r.passed = values[0] < values[1] && values[1] < values[2];
  char buf[160];
  std::snprintf(buf, sizeof buf, "N=4: %.3e, %.3e, %.3e for D = 1, 2, 3 (1D total-time formula %.3e)", values[0],
                values[1], values[2], one_d);
  r.detail = buf;
  r.metrics = {{"predictions", values}, {"one_d_total_time", one_d}};
  return r;
}

Table summary_table(const std::vector<CriterionResult>& results) {
  Table t;
  t.columns = {"id", "passed", "runtime_seconds"};
  for (const auto& r : results) {
    t.rows.push_back({static_cast<double>(r.id), r.passed ? 1.0 : 0.0, r.runtime_seconds});
  }
  return t;
}

using SuiteFn = std::function<std::vector<CriterionResult>(const std::filesystem::path&)>;

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> suites = {
      {"scaling-eps", [](const auto&) { return std::vector{second_order_step()}; }},
      {"dephasing-sigma", [](const auto&) { return std::vector{dephasing_convergence()}; }},
      {"restart-stats", [](const auto&) { return std::vector{restart_recursion(), success_probability_bound()}; }},
      {"dyson-identity", [](const auto&) { return std::vector{dyson_identity()}; }},
      {"d-dim-predict", [](const auto&) { return std::vector{d_dim_predict()}; }},
      {"acceptance", [](const auto& dir) { return run_all(dir / "scratch"); }},
  };
  return suites;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

int run_suite(const std::string& name, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    log << "unknown suite '" << name << "'; available:";
    for (const auto& n : suite_names()) log << ' ' << n;
    log << '\n';
    return harness::kExitConfigError;
  }
  const std::vector<CriterionResult> results = it->second(out_dir);
  bool all = true;
  json criteria = json::array();
  for (const auto& r : results) {
    log << r.summary_line() << '\n';
    all = all && r.passed;
    criteria.push_back(r.to_json());
  }
  // Single-criterion suites emit that criterion's data; the others emit the verdict table.
  const Table& table = results.size() == 1 ? results.front().table : summary_table(results);
  const json summary = {{"schema_version", harness::kSummarySchemaVersion},
                        {"suite", name},
                        {"passed", all},
                        {"criteria", criteria}};
  try {
    harness::write_text_file(out_dir / (name + ".csv"), table.to_csv());
    harness::write_text_file(out_dir / (name + ".json"), summary.dump(2) + "\n");
  } catch (const harness::IoError& e) {
    log << "i/o error: " << e.what() << '\n';
    return harness::kExitIoError;
  }
  return all ? harness::kExitOk : harness::kExitFailedCriterion;
}

}  // namespace thermoprep::validation
