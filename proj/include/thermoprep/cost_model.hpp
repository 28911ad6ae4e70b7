#pragma once

// Evolution-time and restart-count predictors. Asymptotic formulas are the
// dominant term with constant 1; only their scaling is meaningful.

#include <cstddef>
#include <span>
#include <vector>

namespace thermoprep {

struct StepTime {
  double conjugation = 0.0;  // log(1/x) / (eps beta ||h||^2), x = eps beta ||h||
  double dephasing = 0.0;    // log(1/x) / (eps^2 beta ||h||^2)
  double total() const { return conjugation + dephasing; }
};

/// Charged evolution time of one perturbative step. Requires
/// 0 <= eps*beta*||h|| <= 1; a step with eps*||h|| = 0 costs nothing.
StepTime step_time(double eps, double beta, double h_norm);
double conjugation_time(double eps, double beta, double h_norm);

struct RestartPrediction {
  double mean_steps = 0.0;     // <m>: steps until a full run of successes
  double mean_failures = 0.0;  // <alpha>: failed steps (= aborted runs) in that process
  std::vector<double> step_visits;  // expected number of attempts of each step index

  /// Merge attempts per completed merge; each attempt consumes two fresh inputs.
  double mean_attempts() const { return mean_failures + 1.0; }
};

/// Success-run process with per-step success probabilities, solved as a
/// Markov chain (state = number of consecutive successes) by a dense linear
/// solve of the absorption equations.
RestartPrediction restart_predictions(std::span<const double> step_success);
/// Homogeneous case: n_steps steps each succeeding with probability p.
RestartPrediction restart_predictions(double p, std::size_t n_steps);

struct RecursionPrediction {
  std::vector<double> tau;          // iterated recurrence, tau[0] = 0
  std::vector<double> closed_form;  // geometric-sum evaluation of the same recurrence
};

/// tau(k) = 2 * rebuild * tau(k-1) + m, tau(0) = 0. `rebuild` is the number of
/// fresh input pairs consumed per completed merge.
RecursionPrediction recursion_prediction(double m, double rebuild, std::size_t levels);
/// Level-dependent coefficients: m[k-1], rebuild[k-1] apply at level k.
std::vector<double> recursion_prediction(std::span<const double> m, std::span<const double> rebuild);

/// exp((beta ||h|| + ln 2) * levels), the large-level growth of tau.
double asymptotic_steps(double beta_h_norm, std::size_t levels);

/// beta N^(beta ||h||) / eps_bar^2.
double total_time_prediction(double sites, double beta, double h_norm, double eps_bar);
/// beta exp(2 beta ||h|| D N^(D-1)) / eps_bar^2.
double d_dim_prediction(double sites, int dimension, double beta, double h_norm, double eps_bar);

}  // namespace thermoprep
