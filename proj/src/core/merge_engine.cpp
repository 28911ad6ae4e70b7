#include "thermoprep/merge_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thermoprep/errors.hpp"
#include "thermoprep/gibbs_oracle.hpp"

namespace thermoprep {

ErrorLedger& ErrorLedger::operator+=(const ErrorLedger& other) {
  conjugation_second_order += other.conjugation_second_order;
  dephasing_residual += other.dephasing_residual;
  pe_binning += other.pe_binning;
  pe_leakage += other.pe_leakage;
  return *this;
}

ChannelFidelity FidelitySettings::resolve(double eps, double beta, double h_norm) const {
  ChannelFidelity f;
  f.mode = mode;
  f.quadrature = quadrature;
  if (mode == FidelityMode::ideal) return f;
  const double h2 = h_norm * h_norm;
  f.delta = delta.value_or(eps * beta * h2);
  f.pe_time = pe_time.value_or(h_norm > 0.0 ? 0.5 / h_norm : 1.0);
  f.eps_pe = eps_pe.value_or(eps * eps * beta * beta * h2);
  f.zeta = zeta.value_or(eps * eps * beta * h2);
  f.c = c.value_or(f.eps_pe > 0.0 ? std::max(1.0, std::log(1.0 / f.eps_pe)) : 1.0);
  return f;
}

MergeSchedule MergeSchedule::create(double eps, double beta, double h_norm, const FidelitySettings& fidelity) {
  MergeSchedule s;
  s.eps = eps;
  s.beta = beta;
  s.h_norm = h_norm;
  if (!(eps > 0.0) || eps > 1.0) throw ParameterError("MergeSchedule: eps must lie in (0, 1]");
  s.n_steps = static_cast<std::size_t>(std::ceil(1.0 / eps - 1e-9));
  s.fidelity = fidelity.resolve(eps, beta, h_norm);
  s.validate();
  return s;
}

double MergeSchedule::coupling(std::size_t steps) const {
  if (steps >= n_steps) return 1.0;
  return static_cast<double>(steps) * eps;
}

void MergeSchedule::validate() const {
  if (!(eps > 0.0) || eps > 1.0) throw ParameterError("MergeSchedule: eps must lie in (0, 1]");
  if (!(beta > 0.0)) throw ParameterError("MergeSchedule: beta must be > 0");
  if (h_norm < 0.0) throw ParameterError("MergeSchedule: ||h|| must be >= 0");
  if (eps * beta * h_norm > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "MergeSchedule: eps*beta*||h|| = " << eps * beta * h_norm << " exceeds 1";
    throw ParameterError(os.str());
  }
  if (n_steps == 0) throw ParameterError("MergeSchedule: no steps");
  fidelity.validate();
}

StepChannels step_channels(const DensityMatrix& rho, const HermitianOperator& hamiltonian,
                           const HermitianOperator& h_shifted, double from, double to,
                           const MergeSchedule& schedule) {
  if (rho.dim() != hamiltonian.dim() || rho.dim() != h_shifted.dim()) {
    throw ValidationError("perturbative_step: dimension mismatch");
  }
  if (!(to >= from) || from < 0.0 || to > 1.0 + 1e-12) {
    throw ParameterError("perturbative_step: couplings must satisfy 0 <= from <= to <= 1");
  }
  const double step = to - from;
  const double beta = schedule.beta;
  const auto& fid = schedule.fidelity;

  ConjugationResult conj = fid.mode == FidelityMode::ideal
                               ? conjugation_ideal(rho, h_shifted, step, beta)
                               : conjugation_binned(rho, h_shifted, step, beta, fid);

  const HermitianOperator target(hamiltonian.matrix() + to * h_shifted.matrix());
  DensityMatrix out = fid.mode == FidelityMode::ideal ? dephase_ideal(conj.state, target)
                                                      : dephase_gaussian(conj.state, target, fid);

  ErrorLedger ledger;
  const double x = step * beta * schedule.h_norm;
  ledger.conjugation_second_order = x * x;
  if (fid.mode == FidelityMode::imperfect) {
    ledger.dephasing_residual = beta * fid.zeta;
    ledger.pe_binning = conj.errors.pe_binning;
    ledger.pe_leakage = conj.errors.pe_leakage;
  }
  const double time = step_time(step, beta, schedule.h_norm).total();
  return {std::move(out), conj.success_probability, ledger, time};
}

StepOutcome perturbative_step(const DensityMatrix& rho, const HermitianOperator& hamiltonian,
                              const HermitianOperator& h_shifted, double from, double to,
                              const MergeSchedule& schedule, RandomStream& rng) {
  StepChannels ch = step_channels(rho, hamiltonian, h_shifted, from, to, schedule);
  StepOutcome outcome;
  outcome.success_probability = ch.success_probability;
  outcome.ledger = ch.ledger;
  outcome.evolution_time_charged = ch.evolution_time;
  outcome.succeeded = rng.bernoulli(ch.success_probability);
  if (outcome.succeeded) outcome.state = std::move(ch.state);
  return outcome;
}

namespace {

HermitianOperator block_sum(const HermitianOperator& left, const HermitianOperator& right) {
  const Matrix id_l = Matrix::Identity(left.dim(), left.dim());
  const Matrix id_r = Matrix::Identity(right.dim(), right.dim());
  return HermitianOperator(tensor_product(left.matrix(), id_r) + tensor_product(id_l, right.matrix()));
}

}  // namespace

MergeResult merge_blocks(const DensityMatrix& rho_left, const DensityMatrix& rho_right,
                         const HermitianOperator& h_left, const HermitianOperator& h_right,
                         const HermitianOperator& link, const MergeSchedule& schedule, RandomStream& rng) {
  const HermitianOperator h0 = block_sum(h_left, h_right);
  DensityMatrix rho = tensor_product(rho_left, rho_right);
  MergeResult result;
  for (std::size_t i = 0; i < schedule.n_steps; ++i) {
    StepOutcome step = perturbative_step(rho, h0, link, schedule.coupling(i), schedule.coupling(i + 1), schedule, rng);
    result.stats.steps_attempted++;
    result.stats.charged_time += step.evolution_time_charged;
    result.stats.ledger += step.ledger;
    result.stats.success_probabilities.push_back(step.success_probability);
    if (!step.succeeded) {
      result.failed_step = i;
      return result;
    }
    rho = std::move(*step.state);
  }
  result.state = std::move(rho);
  return result;
}

MergeTrajectory merge_trajectory(const DensityMatrix& rho_left, const DensityMatrix& rho_right,
                                 const HermitianOperator& h_left, const HermitianOperator& h_right,
                                 const HermitianOperator& link, const MergeSchedule& schedule) {
  const HermitianOperator h0 = block_sum(h_left, h_right);
  DensityMatrix rho = tensor_product(rho_left, rho_right);
  std::vector<double> probs, times;
  probs.reserve(schedule.n_steps);
  times.reserve(schedule.n_steps);
  ErrorLedger ledger;
  for (std::size_t i = 0; i < schedule.n_steps; ++i) {
    StepChannels ch = step_channels(rho, h0, link, schedule.coupling(i), schedule.coupling(i + 1), schedule);
    probs.push_back(ch.success_probability);
    times.push_back(ch.evolution_time);
    ledger += ch.ledger;
    rho = std::move(ch.state);
  }
  return {std::move(probs), std::move(times), ledger, std::move(rho)};
}

namespace {

std::size_t log2_exact(std::size_t n) {
  std::size_t levels = 0;
  while ((std::size_t{1} << levels) < n) ++levels;
  if ((std::size_t{1} << levels) != n) {
    std::ostringstream os;
    os << "prepare_chain: number of sites must be a power of 2, got " << n;
    throw ParameterError(os.str());
  }
  return levels;
}

void check_resources(const ChainModel& model, Index max_dim) {
  Index dim = 1;
  for (std::size_t s = 0; s < model.sites; ++s) {
    if (dim > max_dim / model.local_dim) {
      std::ostringstream os;
      os << "chain dimension " << model.local_dim << "^" << model.sites << " exceeds the cap " << max_dim;
      throw ResourceError(os.str());
    }
    dim *= model.local_dim;
  }
}

double merge_expected_time(const RestartPrediction& pred, const std::vector<double>& step_time) {
  double t = 0.0;
  for (std::size_t i = 0; i < step_time.size(); ++i) t += pred.step_visits[i] * step_time[i];
  return t;
}

std::vector<LevelPrediction> level_predictions(const ChainPlan& plan) {
  std::vector<LevelPrediction> preds;
  std::vector<double> m, rebuild, merge_time;
  for (std::size_t k = 1; k <= plan.levels; ++k) {
    const auto& row = plan.merges[k - 1];
    LevelPrediction p;
    p.level = k;
    double sum_m = 0.0, sum_alpha = 0.0, sum_time = 0.0;
    for (const auto& rec : row) {
      for (double q : rec.success_probability) p.min_success_probability = std::min(p.min_success_probability, q);
      sum_m += rec.prediction.mean_steps;
      sum_alpha += rec.prediction.mean_failures;
      sum_time += rec.expected_time;
    }
    const auto count = static_cast<double>(row.size());
    p.mean_steps = sum_m / count;
    p.mean_failures = sum_alpha / count;
    m.push_back(p.mean_steps);
    rebuild.push_back(p.mean_failures + 1.0);
    merge_time.push_back(sum_time / count);
    preds.push_back(p);
  }
  const auto tau = recursion_prediction(m, rebuild);
  const auto time = recursion_prediction(merge_time, rebuild);
  double processes = 1.0;
  for (std::size_t k = plan.levels; k >= 1; --k) {
    preds[k - 1].tau = tau[k];
    preds[k - 1].expected_time = time[k];
    preds[k - 1].expected_processes = processes;
    processes *= 2.0 * rebuild[k - 1];
  }
  return preds;
}

CostReport empty_report(const ChainPlan& plan, CostMode mode) {
  CostReport report;
  report.mode = mode;
  report.predictions = level_predictions(plan);
  for (std::size_t k = 1; k <= plan.levels; ++k) {
    LevelCounters c;
    c.level = k;
    report.levels.push_back(c);
  }
  if (plan.levels > 0) {
    report.predicted_total_steps = report.predictions.back().tau;
    report.predicted_total_time = report.predictions.back().expected_time;
  }
  return report;
}

class RestartSimulator {
 public:
  RestartSimulator(const ChainPlan& plan, RandomStream& rng, CostReport& report, std::uint64_t max_steps)
      : plan_(plan), rng_(rng), report_(report), max_steps_(max_steps) {}

  struct Built {
    std::uint64_t steps = 0;
    double time = 0.0;
  };

  Built build(std::size_t level, std::size_t position) {
    if (level == 0) return {};
    const MergeRecord& rec = plan_.merges[level - 1][position];
    LevelCounters& counters = report_.levels[level - 1];
    Built total;
    std::uint64_t merge_steps = 0;
    while (true) {
      const Built left = build(level - 1, 2 * position);
      const Built right = build(level - 1, 2 * position + 1);
      total.steps += left.steps + right.steps;
      total.time += left.time + right.time;

      counters.merge_attempts++;
      bool completed = true;
      for (std::size_t i = 0; i < rec.success_probability.size(); ++i) {
        merge_steps++;
        counters.steps_attempted++;
        counters.charged_time += rec.step_time[i];
        total.time += rec.step_time[i];
        if (++steps_so_far_ > max_steps_) throw ResourceError("simulate_restarts: step budget exhausted");
        if (!rng_.bernoulli(rec.success_probability[i])) {
          counters.failures++;
          completed = false;
          break;
        }
      }
      if (completed) break;
    }
    total.steps += merge_steps;
    counters.blocks_built++;
    counters.tau_samples.push_back(static_cast<double>(total.steps));
    counters.m_samples.push_back(static_cast<double>(merge_steps));
    return total;
  }

 private:
  const ChainPlan& plan_;
  RandomStream& rng_;
  CostReport& report_;
  std::uint64_t max_steps_;
  std::uint64_t steps_so_far_ = 0;
};

}  // namespace

ChainPlan plan_chain(const ChainModel& model, double beta, const PrepareOptions& options) {
  model.validate();
  if (!(beta > 0.0)) throw ParameterError("prepare_chain: beta must be > 0");
  check_resources(model, options.max_dim);
  const std::size_t levels = log2_exact(model.sites);

  const double h_norm = model.link_norm_bound();
  double eps = 0.0;
  if (options.eps) {
    eps = *options.eps;
  } else if (options.eps_bar) {
    const double eps_bar = *options.eps_bar;
    if (!(eps_bar > 0.0) || eps_bar >= 1.0) throw ParameterError("prepare_chain: eps_bar must lie in (0, 1)");
    const double denom = static_cast<double>(model.sites) * beta * beta * h_norm * h_norm;
    eps = denom > 0.0 ? std::min(1.0, eps_bar / denom) : 1.0;
  } else {
    throw ParameterError("prepare_chain: either eps or eps_bar is required");
  }
  const MergeSchedule schedule = MergeSchedule::create(eps, beta, h_norm, options.fidelity);

  // Level 0: exact single-site Gibbs states.
  struct Block {
    DensityMatrix state;
    HermitianOperator hamiltonian;
  };
  std::vector<Block> blocks;
  for (std::size_t s = 0; s < model.sites; ++s) {
    HermitianOperator h = build_block_hamiltonian(model, s, s);
    blocks.push_back({gibbs_state(h, beta), std::move(h)});
  }

  std::vector<std::vector<MergeRecord>> merges;
  ErrorLedger total_ledger;
  std::size_t width = 1;
  for (std::size_t k = 1; k <= levels; ++k) {
    std::vector<Block> next;
    std::vector<MergeRecord> row;
    for (std::size_t j = 0; j < blocks.size() / 2; ++j) {
      const std::size_t first = 2 * j * width;
      const std::size_t boundary = first + width - 1;
      const std::size_t last = first + 2 * width - 1;
      const ShiftedOperator link = shifted_link_term(model, boundary, first, last);
      const Block& left = blocks[2 * j];
      const Block& right = blocks[2 * j + 1];
      MergeTrajectory traj = merge_trajectory(left.state, right.state, left.hamiltonian, right.hamiltonian,
                                              link.shifted, schedule);
      MergeRecord rec;
      rec.level = k;
      rec.position = j;
      rec.prediction = restart_predictions(traj.success_probability);
      rec.expected_time = merge_expected_time(rec.prediction, traj.step_time);
      rec.success_probability = std::move(traj.success_probability);
      rec.step_time = std::move(traj.step_time);
      rec.ledger = traj.ledger;
      total_ledger += traj.ledger;
      row.push_back(std::move(rec));
      next.push_back({std::move(traj.final_state), build_block_hamiltonian(model, first, last)});
    }
    merges.push_back(std::move(row));
    blocks = std::move(next);
    width *= 2;
  }

  HermitianOperator full = build_block_hamiltonian(model, 0, model.sites - 1);
  return ChainPlan{model,  beta, schedule, levels, std::move(merges), std::move(blocks.front().state),
                   std::move(full), total_ledger};
}

CostReport expected_costs(const ChainPlan& plan) {
  CostReport report = empty_report(plan, CostMode::single_pass);
  for (std::size_t k = 1; k <= plan.levels; ++k) {
    const auto& row = plan.merges[k - 1];
    double merge_time = 0.0;
    for (const auto& rec : row) merge_time += rec.expected_time;
    merge_time /= static_cast<double>(row.size());
    // Level k merge processes per chain, each charging the mean merge time.
    report.levels[k - 1].charged_time = report.predictions[k - 1].expected_processes * merge_time;
    report.total_charged_time += report.levels[k - 1].charged_time;
  }
  return report;
}

CostReport simulate_restarts(const ChainPlan& plan, RandomStream& rng, std::uint64_t max_steps) {
  CostReport report = empty_report(plan, CostMode::faithful);
  if (plan.levels == 0) return report;
  RestartSimulator sim(plan, rng, report, max_steps);
  sim.build(plan.levels, 0);
  for (const auto& c : report.levels) {
    report.total_steps += c.steps_attempted;
    report.total_charged_time += c.charged_time;
  }
  return report;
}

ChainPreparation prepare_chain(const ChainModel& model, double beta, const PrepareOptions& options,
                               RandomStream& rng) {
  ChainPlan plan = plan_chain(model, beta, options);
  CostReport report =
      options.cost_mode == CostMode::faithful ? simulate_restarts(plan, rng) : expected_costs(plan);
  return {std::move(plan.state), std::move(report)};
}

double sequence_error_budget(double eps, double beta, double h_norm, std::size_t sites) {
  if (eps < 0.0 || !(beta > 0.0) || h_norm < 0.0) throw ParameterError("sequence_error_budget: invalid arguments");
  return static_cast<double>(sites) * eps * beta * beta * h_norm * h_norm;
}

double sequence_error_budget(const MergeSchedule& schedule, std::size_t sites) {
  return sequence_error_budget(schedule.eps, schedule.beta, schedule.h_norm, sites);
}

}  // namespace thermoprep
