#include "thermoprep/harness/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "thermoprep/errors.hpp"
#include "thermoprep/gibbs_oracle.hpp"

namespace thermoprep::harness {

using nlohmann::json;

namespace {

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

SampleStats sample_stats(const std::vector<double>& xs) {
  SampleStats s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return s;
}

json stats_json(const SampleStats& s) { return {{"mean", s.mean}, {"stderr", s.stderr_}, {"samples", s.count}}; }

json ledger_json(const ErrorLedger& l) {
  return {{"conjugation_second_order", l.conjugation_second_order},
          {"dephasing_residual", l.dephasing_residual},
          {"pe_binning", l.pe_binning},
          {"pe_leakage", l.pe_leakage},
          {"total", l.total()}};
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json build_summary(const ExperimentConfig& config, const ExperimentResult& r) {
  const ChainPlan& plan = r.plan;
  const auto& schedule = plan.schedule;
  const double budget = sequence_error_budget(schedule, plan.model.sites);

  json levels = json::array();
  for (std::size_t k = 1; k <= plan.levels; ++k) {
    const LevelPrediction& pred = r.trials.front().predictions[k - 1];
    json level = {{"level", k},
                  {"predicted",
                   {{"min_success_probability", pred.min_success_probability},
                    {"mean_steps", pred.mean_steps},
                    {"mean_failures", pred.mean_failures},
                    {"tau", pred.tau},
                    {"expected_time", pred.expected_time}}}};
    if (config.run.cost_mode == CostMode::faithful) {
      std::vector<double> tau, m;
      std::uint64_t failures = 0, built = 0;
      for (const auto& t : r.trials) {
        const LevelCounters& c = t.levels[k - 1];
        tau.insert(tau.end(), c.tau_samples.begin(), c.tau_samples.end());
        m.insert(m.end(), c.m_samples.begin(), c.m_samples.end());
        failures += c.failures;
        built += c.blocks_built;
      }
      const SampleStats tau_s = sample_stats(tau);
      const SampleStats m_s = sample_stats(m);
      const double alpha = built > 0 ? static_cast<double>(failures) / static_cast<double>(built) : 0.0;
      level["empirical"] = {{"tau", stats_json(tau_s)}, {"mean_steps", stats_json(m_s)}, {"mean_failures", alpha}};
      level["ratio"] = {{"tau", pred.tau > 0.0 ? tau_s.mean / pred.tau : 0.0},
                        {"mean_steps", pred.mean_steps > 0.0 ? m_s.mean / pred.mean_steps : 0.0},
                        {"mean_failures", pred.mean_failures > 0.0 ? alpha / pred.mean_failures : 0.0}};
    } else {
      level["empirical"] = nullptr;
    }
    levels.push_back(level);
  }

  std::vector<double> charged, steps;
  for (const auto& t : r.trials) {
    charged.push_back(t.total_charged_time);
    steps.push_back(static_cast<double>(t.total_steps));
  }
  const CostReport& first = r.trials.front();
  const double eps_bar_effective = budget;
  json totals = {{"predicted_total_steps", first.predicted_total_steps},
                 {"predicted_total_time", first.predicted_total_time},
                 {"charged_time", stats_json(sample_stats(charged))}};
  if (config.run.cost_mode == CostMode::faithful) totals["steps"] = stats_json(sample_stats(steps));
  if (plan.levels > 0 && schedule.h_norm > 0.0) {
    totals["asymptotic_total_time"] =
        total_time_prediction(static_cast<double>(plan.model.sites), plan.beta, schedule.h_norm, eps_bar_effective);
    totals["asymptotic_steps"] = asymptotic_steps(plan.beta * schedule.h_norm, plan.levels);
  }

  return {{"schema_version", kSummarySchemaVersion},
          {"model", plan.model.name},
          {"sites", plan.model.sites},
          {"levels", plan.levels},
          {"beta", plan.beta},
          {"eps", schedule.eps},
          {"n_steps", schedule.n_steps},
          {"link_norm", schedule.h_norm},
          {"cost_mode", to_string(config.run.cost_mode)},
          {"trials", config.run.trials},
          {"trace_distance", r.trace_distance},
          {"error_budget", budget},
          {"error_ledger", ledger_json(plan.ledger)},
          {"state_hash", r.state_hash},
          {"per_level", levels},
          {"totals", totals}};
}

}  // namespace

std::string state_hash(const Matrix& m) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
  const std::size_t n = static_cast<std::size_t>(m.size()) * sizeof(Complex);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string format_trials_csv(const std::vector<CostReport>& trials) {
  std::string out = kTrialCsvHeader;
  out += '\n';
  for (std::size_t t = 0; t < trials.size(); ++t) {
    for (const auto& c : trials[t].levels) {
      out += std::to_string(t) + ',' + std::to_string(c.level) + ',' + std::to_string(c.blocks_built) + ',' +
             std::to_string(c.merge_attempts) + ',' + std::to_string(c.failures) + ',' +
             std::to_string(c.steps_attempted) + ',' + format_double(c.charged_time) + '\n';
    }
  }
  return out;
}

ExperimentResult execute_experiment(const ExperimentConfig& config) {
  config.validate();
  const ChainModel model = build_model(config.model);
  ExperimentResult r{[&] {
    try {
      return plan_chain(model, config.beta, config.prepare_options());
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }()};

  const DensityMatrix exact = gibbs_state(r.plan.hamiltonian, config.beta);
  r.trace_distance = trace_distance(r.plan.state, exact);
  r.state_hash = state_hash(r.plan.state.matrix());

  r.trials.resize(config.run.trials);
  const RandomStream root(config.run.seed);
  parallel_for(config.run.trials, config.run.threads, [&](std::size_t trial) {
    if (config.run.cost_mode == CostMode::faithful) {
      RandomStream rng = root.fork({static_cast<std::uint64_t>(trial)});
      r.trials[trial] = simulate_restarts(r.plan, rng);
    } else {
      r.trials[trial] = expected_costs(r.plan);
    }
  });

  r.resolved = resolved_config(config, r.plan.schedule);
  r.trials_csv = format_trials_csv(r.trials);
  r.summary = build_summary(config, r);
  return r;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
  std::optional<ExperimentResult> result;
  try {
    result = execute_experiment(config);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ValidationError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ResourceError& e) {
    log << "resource cap: " << e.what() << '\n';
    return kExitResourceCap;
  }
  const ExperimentResult& r = *result;
  try {
    const auto& dir = config.output.directory;
    write_text_file(dir / "resolved_config.json", r.resolved.dump(2) + "\n");
    if (config.output.wants("csv")) write_text_file(dir / "trials.csv", r.trials_csv);
    if (config.output.wants("json")) write_text_file(dir / "summary.json", r.summary.dump(2) + "\n");
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  }
  log << "trace distance " << r.trace_distance << " (budget " << r.summary["error_budget"].get<double>()
      << "), state hash " << r.state_hash << ", outputs in " << config.output.directory.string() << '\n';
  return kExitOk;
}

}  // namespace thermoprep::harness
