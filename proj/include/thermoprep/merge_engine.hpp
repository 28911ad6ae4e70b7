#pragma once

// One perturbative update (conjugation, then dephasing), the coupling sweep
// that merges two thermal blocks, and the binary merge recursion over a chain.

#include <cstdint>
#include <optional>
#include <vector>

#include "thermoprep/cost_model.hpp"
#include "thermoprep/hamiltonian_models.hpp"
#include "thermoprep/operator_core.hpp"
#include "thermoprep/random.hpp"
#include "thermoprep/thermal_channels.hpp"

namespace thermoprep {

/// Trace-norm error contributions of one step (or a sum of steps). All entries
/// are dominant-term bounds with constant 1.
struct ErrorLedger {
  double conjugation_second_order = 0.0;  // eps^2 beta^2 ||h||^2
  double dephasing_residual = 0.0;        // beta zeta (imperfect dephasing)
  double pe_binning = 0.0;                // eps beta delta
  double pe_leakage = 0.0;                // 2 eps_pe

  double total() const { return conjugation_second_order + dephasing_residual + pe_binning + pe_leakage; }
  ErrorLedger& operator+=(const ErrorLedger& other);
};

/// Requested channel fidelity. Unset imperfect-mode fields are derived from
/// the step size: zeta = eps^2 beta ||h||^2, delta = eps beta ||h||^2,
/// eps_pe = eps^2 beta^2 ||h||^2, pe_time = 1 / (2 ||h||), c = max(1, ln(1/eps_pe)).
struct FidelitySettings {
  FidelityMode mode = FidelityMode::ideal;
  std::optional<double> delta;
  std::optional<double> pe_time;
  std::optional<double> eps_pe;
  std::optional<double> zeta;
  std::optional<double> c;
  QuadratureSpec quadrature;

  ChannelFidelity resolve(double eps, double beta, double h_norm) const;
};

struct MergeSchedule {
  double eps = 0.0;
  std::size_t n_steps = 0;  // ceil(1/eps); the last step lands exactly on coupling 1
  double beta = 1.0;
  double h_norm = 0.0;  // ||h|| of the PSD-shifted link terms
  ChannelFidelity fidelity;

  static MergeSchedule create(double eps, double beta, double h_norm, const FidelitySettings& fidelity = {});

  /// Coupling reached after `steps` steps.
  double coupling(std::size_t steps) const;
  double step_size(std::size_t step) const { return coupling(step + 1) - coupling(step); }
  void validate() const;
};

/// The deterministic part of one step: channel outputs before the success draw.
struct StepChannels {
  DensityMatrix state;  // post-selected and dephased
  double success_probability;
  ErrorLedger ledger;
  double evolution_time;
};

struct StepOutcome {
  bool succeeded = false;
  std::optional<DensityMatrix> state;  // present on success
  double success_probability = 0.0;
  ErrorLedger ledger;
  double evolution_time_charged = 0.0;
};

/// Updates rho ~ Gibbs(H + from * h) to Gibbs(H + to * h): conjugation with
/// step size (to - from), then dephasing in the eigenbasis of H + to * h.
StepChannels step_channels(const DensityMatrix& rho, const HermitianOperator& hamiltonian,
                           const HermitianOperator& h_shifted, double from, double to,
                           const MergeSchedule& schedule);

/// step_channels followed by a success draw from `rng`.
StepOutcome perturbative_step(const DensityMatrix& rho, const HermitianOperator& hamiltonian,
                              const HermitianOperator& h_shifted, double from, double to,
                              const MergeSchedule& schedule, RandomStream& rng);

struct MergeStats {
  std::size_t steps_attempted = 0;
  double charged_time = 0.0;
  ErrorLedger ledger;
  std::vector<double> success_probabilities;
};

struct MergeResult {
  std::optional<DensityMatrix> state;     // on success
  std::optional<std::size_t> failed_step;  // on failure
  MergeStats stats;
};

/// One attempt at the full coupling sweep from rho_left (x) rho_right. `link`
/// is the PSD-shifted link term embedded in the merged block.
MergeResult merge_blocks(const DensityMatrix& rho_left, const DensityMatrix& rho_right,
                         const HermitianOperator& h_left, const HermitianOperator& h_right,
                         const HermitianOperator& link, const MergeSchedule& schedule, RandomStream& rng);

/// The success-conditioned sweep: channel outputs do not depend on the
/// random draws, so one trajectory serves every restart of the same merge.
struct MergeTrajectory {
  std::vector<double> success_probability;
  std::vector<double> step_time;
  ErrorLedger ledger;
  DensityMatrix final_state;
};

MergeTrajectory merge_trajectory(const DensityMatrix& rho_left, const DensityMatrix& rho_right,
                                 const HermitianOperator& h_left, const HermitianOperator& h_right,
                                 const HermitianOperator& link, const MergeSchedule& schedule);

enum class CostMode { faithful, single_pass };

struct PrepareOptions {
  std::optional<double> eps_bar;  // eps = eps_bar / (N beta^2 ||h||^2) unless eps is given
  std::optional<double> eps;
  FidelitySettings fidelity;
  CostMode cost_mode = CostMode::single_pass;
  Index max_dim = 1024;
};

struct MergeRecord {
  std::size_t level = 0;
  std::size_t position = 0;
  std::vector<double> success_probability;
  std::vector<double> step_time;
  ErrorLedger ledger;
  RestartPrediction prediction;
  double expected_time = 0.0;  // sum_i visits_i * step_time_i
};

/// Every merge of the recursion evaluated once. merges[k-1][j] merges the two
/// level-(k-1) blocks 2j and 2j+1 into block j of level k.
struct ChainPlan {
  ChainModel model;
  double beta = 1.0;
  MergeSchedule schedule;
  std::size_t levels = 0;
  std::vector<std::vector<MergeRecord>> merges;
  DensityMatrix state;
  HermitianOperator hamiltonian;  // full chain, unshifted
  ErrorLedger ledger;             // summed over every merge
};

struct LevelCounters {
  std::size_t level = 0;
  std::uint64_t blocks_built = 0;  // completed level-k blocks, including rebuilds
  std::uint64_t merge_attempts = 0;
  std::uint64_t failures = 0;
  std::uint64_t steps_attempted = 0;
  double charged_time = 0.0;
  std::vector<double> tau_samples;  // steps behind each completed block, subtree included
  std::vector<double> m_samples;    // steps of the block's own merge process
};

struct LevelPrediction {
  std::size_t level = 0;
  double min_success_probability = 1.0;
  double mean_steps = 0.0;     // <m>
  double mean_failures = 0.0;  // <alpha>
  double tau = 0.0;            // recurrence with rebuild factor <alpha> + 1
  double expected_time = 0.0;  // same recurrence applied to charged time
  double expected_processes = 0.0;  // expected number of level-k merge processes per chain
};

/// Per-level accounting. In faithful mode the counters hold one simulated
/// restart tree; in single-pass mode counters stay zero and charged_time holds
/// expectations. Level entries run from 1 to levels; level 0 costs nothing.
struct CostReport {
  CostMode mode = CostMode::single_pass;
  std::vector<LevelCounters> levels;
  std::vector<LevelPrediction> predictions;
  std::uint64_t total_steps = 0;
  double total_charged_time = 0.0;
  double predicted_total_steps = 0.0;
  double predicted_total_time = 0.0;
};

ChainPlan plan_chain(const ChainModel& model, double beta, const PrepareOptions& options);

/// Expected costs of the plan, no sampling.
CostReport expected_costs(const ChainPlan& plan);
/// One literal restart tree: a failed merge discards both inputs, which are
/// rebuilt from scratch before the merge is retried.
CostReport simulate_restarts(const ChainPlan& plan, RandomStream& rng,
                             std::uint64_t max_steps = 2'000'000'000ULL);

struct ChainPreparation {
  DensityMatrix state;
  CostReport report;
};

ChainPreparation prepare_chain(const ChainModel& model, double beta, const PrepareOptions& options,
                               RandomStream& rng);

/// Predicted total trace-norm error N * eps * beta^2 * ||h||^2.
double sequence_error_budget(const MergeSchedule& schedule, std::size_t sites);
double sequence_error_budget(double eps, double beta, double h_norm, std::size_t sites);

}  // namespace thermoprep
