#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "thermoprep/harness/config.hpp"
#include "thermoprep/harness/experiment.hpp"
#include "thermoprep/validation/criteria.hpp"
#include "thermoprep/validation/suites.hpp"

using namespace thermoprep;
using namespace thermoprep::harness;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "thermoprep_harness_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

json ising4() {
  return json::parse(R"({
    "model": {"name": "ising", "sites": 4, "couplings": {"J": 1.0, "g": 1.0}},
    "beta": 1.0,
    "eps_bar": 0.1,
    "run": {"seed": 7, "trials": 100, "cost_mode": "faithful"}
  })");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const auto c = parse_config(ising4());
    CHECK(c.model.sites == 4);
    CHECK(c.run.trials == 100);
    CHECK(c.run.cost_mode == CostMode::faithful);
    CHECK(c.run.max_qubits == 10);
    CHECK(c.max_dim() == 1024);
    CHECK(c.output.wants("csv"));
    CHECK(c.fidelity.mode == FidelityMode::ideal);
  }
  SUBCASE("unknown keys are rejected at every level") {
    for (const char* path : {"/typo", "/model/typo", "/run/typo", "/output/typo"}) {
      json t = ising4();
      t["output"] = json::object();
      t[json::json_pointer(path)] = 1;
      CHECK_THROWS_AS(parse_config(t), ConfigError);
    }
    json t = ising4();
    t["fidelity"] = {{"mode", "imperfect"}, {"quadrature", {{"nodes", 10}, {"bogus", 1}}}};
    CHECK_THROWS_AS(parse_config(t), ConfigError);
  }
  SUBCASE("validation") {
    auto bad = [](auto edit) {
      json t = ising4();
      edit(t);
      return parse_config(t);
    };
    CHECK_THROWS_AS(bad([](json& t) { t["run"]["trials"] = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](json& t) { t["model"]["sites"] = 3; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](json& t) { t["eps"] = 0.01; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](json& t) { t.erase("eps_bar"); }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](json& t) { t["beta"] = -1.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](json& t) { t["model"]["couplings"]["K"] = 1.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](json& t) { t["model"]["name"] = "potts"; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](json& t) { t["run"]["cost_mode"] = "lazy"; }), ConfigError);
    CHECK_THROWS_AS(bad([](json& t) { t["beta"] = "hot"; }), ConfigError);
  }
  SUBCASE("cost mode spellings") {
    CHECK(parse_cost_mode("single-pass") == CostMode::single_pass);
    CHECK(parse_cost_mode("faithful") == CostMode::faithful);
    CHECK(std::string(to_string(CostMode::single_pass)) == "single-pass");
  }
}

TEST_CASE("run_experiment") {
  SUBCASE("trials = 0 is a config error") {
    auto c = parse_config(ising4());
    c.run.trials = 0;
    c.output.directory = scratch("zero_trials");
    std::ostringstream log;
    CHECK(run_experiment(c, log) == kExitConfigError);
  }
  SUBCASE("one site: exact state, no merges") {
    json t = ising4();
    t["model"]["sites"] = 1;
    auto c = parse_config(t);
    c.output.directory = scratch("one_site");
    std::ostringstream log;
    REQUIRE(run_experiment(c, log) == kExitOk);
    const json summary = json::parse(slurp(c.output.directory / "summary.json"));
    CHECK(summary["trace_distance"].get<double>() == 0.0);
    CHECK(summary["levels"].get<int>() == 0);
    CHECK(summary["per_level"].empty());
    CHECK(summary["schema_version"].get<int>() == kSummarySchemaVersion);
  }
  SUBCASE("reruns are byte-identical and thread-count independent") {
    std::vector<std::string> csvs;
    for (std::size_t threads : {1u, 1u, 4u}) {
      auto c = parse_config(ising4());
      c.run.threads = threads;
      c.output.directory = scratch("determinism_" + std::to_string(csvs.size()));
      std::ostringstream log;
      REQUIRE(run_experiment(c, log) == kExitOk);
      csvs.push_back(slurp(c.output.directory / "trials.csv"));
    }
    CHECK(csvs[0] == csvs[1]);
    CHECK(csvs[0] == csvs[2]);
    CHECK(csvs[0].rfind(std::string(kTrialCsvHeader) + "\n", 0) == 0);
    // 100 trials x 2 levels plus the header.
    CHECK(std::count(csvs[0].begin(), csvs[0].end(), '\n') == 201);
  }
  SUBCASE("summary totals agree with the CSV rows") {
    auto c = parse_config(ising4());
    c.run.trials = 5;
    const auto r = execute_experiment(c);
    double csv_time = 0.0;
    std::istringstream rows(r.trials_csv);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) csv_time += std::stod(line.substr(line.rfind(',') + 1));
    CHECK(r.summary["totals"]["charged_time"]["mean"].get<double>() * 5.0 == doctest::Approx(csv_time).epsilon(1e-12));
  }
  SUBCASE("resolved config echoes derived defaults") {
    json t = ising4();
    t["fidelity"] = {{"mode", "imperfect"}};
    t["run"]["trials"] = 1;
    t["run"]["cost_mode"] = "single-pass";
    auto c = parse_config(t);
    const auto r = execute_experiment(c);
    const auto& s = r.plan.schedule;
    CHECK(r.resolved["eps"].get<double>() == s.eps);
    CHECK(r.resolved["fidelity"]["zeta"].get<double>() == s.fidelity.zeta);
    CHECK(r.resolved["fidelity"]["delta"].get<double>() == s.fidelity.delta);
    CHECK(r.resolved["fidelity"]["eps_pe"].get<double>() == s.fidelity.eps_pe);
    CHECK(r.resolved["fidelity"]["c"].get<double>() == s.fidelity.c);
    CHECK(r.resolved["n_steps"].get<std::size_t>() == s.n_steps);
  }
  SUBCASE("resource cap") {
    json t = ising4();
    t["model"]["sites"] = 8;
    t["run"]["max_qubits"] = 6;
    auto c = parse_config(t);
    c.output.directory = scratch("cap");
    std::ostringstream log;
    CHECK(run_experiment(c, log) == kExitResourceCap);
  }
  SUBCASE("unwritable output directory") {
    const auto dir = scratch("io");
    std::ofstream(dir / "blocker") << "x";
    auto c = parse_config(ising4());
    c.run.trials = 1;
    c.output.directory = dir / "blocker" / "out";
    std::ostringstream log;
    CHECK(run_experiment(c, log) == kExitIoError);
  }
}

TEST_CASE("suites") {
  SUBCASE("unknown suite") {
    std::ostringstream log;
    CHECK(validation::run_suite("no-such-suite", scratch("suite_unknown"), log) == 2);
  }
  SUBCASE("dyson identity on three seeds") {
    const auto r = validation::dyson_identity({1, 2, 3});
    CHECK(r.passed);
    CHECK(r.metrics["max_residual"].get<double>() < 1e-8);
  }
  SUBCASE("d-dim-predict writes its artifacts") {
    const auto dir = scratch("suite_ddim");
    std::ostringstream log;
    CHECK(validation::run_suite("d-dim-predict", dir, log) == 0);
    CHECK(std::filesystem::exists(dir / "d-dim-predict.csv"));
    const json j = json::parse(slurp(dir / "d-dim-predict.json"));
    const auto values = j["criteria"][0]["metrics"]["predictions"].get<std::vector<double>>();
    REQUIRE(values.size() == 3);
    CHECK(values[0] < values[1]);
    CHECK(values[1] < values[2]);
  }
}
