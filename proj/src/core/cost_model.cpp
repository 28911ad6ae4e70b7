#include "thermoprep/cost_model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "thermoprep/errors.hpp"

namespace thermoprep {

namespace {

double log_inverse(double eps, double beta, double h_norm) {
  if (eps < 0.0 || !(beta > 0.0) || h_norm < 0.0) {
    throw ParameterError("step_time: eps, ||h|| must be >= 0 and beta > 0");
  }
  const double x = eps * beta * h_norm;
  if (x > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "step_time: eps*beta*||h|| = " << x << " exceeds 1";
    throw ParameterError(os.str());
  }
  return x >= 1.0 ? 0.0 : std::log(1.0 / x);
}

}  // namespace

StepTime step_time(double eps, double beta, double h_norm) {
  if (eps * h_norm == 0.0) {
    log_inverse(eps, beta, h_norm);
    return {};
  }
  const double log_term = log_inverse(eps, beta, h_norm);
  const double h2 = h_norm * h_norm;
  return {log_term / (eps * beta * h2), log_term / (eps * eps * beta * h2)};
}

double conjugation_time(double eps, double beta, double h_norm) {
  return step_time(eps, beta, h_norm).conjugation;
}

RestartPrediction restart_predictions(std::span<const double> step_success) {
  const auto n = static_cast<Eigen::Index>(step_success.size());
  if (n == 0) throw ParameterError("restart_predictions: need at least one step");
  for (double p : step_success) {
    if (!(p > 0.0) || p > 1.0) throw ParameterError("restart_predictions: probabilities must lie in (0, 1]");
  }

  // Transient state i = i consecutive successes. From i: success -> i+1 (absorbing at n),
  // failure -> 0. Visits v solve v = e_0 + Q^T v.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = step_success[static_cast<std::size_t>(i)];
    if (i + 1 < n) a(i + 1, i) -= p;
    a(0, i) -= 1.0 - p;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[0] = 1.0;
  const Eigen::VectorXd visits = a.partialPivLu().solve(rhs);

  RestartPrediction out;
  out.step_visits.assign(visits.data(), visits.data() + n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.mean_steps += visits[i];
    out.mean_failures += visits[i] * (1.0 - step_success[static_cast<std::size_t>(i)]);
  }
  return out;
}

RestartPrediction restart_predictions(double p, std::size_t n_steps) {
  const std::vector<double> probs(n_steps, p);
  return restart_predictions(probs);
}

RecursionPrediction recursion_prediction(double m, double rebuild, std::size_t levels) {
  if (m < 0.0 || rebuild < 0.0) throw ParameterError("recursion_prediction: coefficients must be >= 0");
  RecursionPrediction out;
  out.tau.assign(levels + 1, 0.0);
  out.closed_form.assign(levels + 1, 0.0);
  const double r = 2.0 * rebuild;
  for (std::size_t k = 1; k <= levels; ++k) {
    out.tau[k] = r * out.tau[k - 1] + m;
    // m * (r^k - 1) / (r - 1), with the r = 1 limit m * k.
    const auto kd = static_cast<double>(k);
    out.closed_form[k] = std::abs(r - 1.0) < 1e-12 ? m * kd : m * (std::pow(r, kd) - 1.0) / (r - 1.0);
  }
  return out;
}

std::vector<double> recursion_prediction(std::span<const double> m, std::span<const double> rebuild) {
  if (m.size() != rebuild.size()) throw ParameterError("recursion_prediction: length mismatch");
  std::vector<double> tau(m.size() + 1, 0.0);
  for (std::size_t k = 1; k <= m.size(); ++k) {
    if (m[k - 1] < 0.0 || rebuild[k - 1] < 0.0) {
      throw ParameterError("recursion_prediction: coefficients must be >= 0");
    }
    tau[k] = 2.0 * rebuild[k - 1] * tau[k - 1] + m[k - 1];
  }
  return tau;
}

double asymptotic_steps(double beta_h_norm, std::size_t levels) {
  return std::exp((beta_h_norm + std::log(2.0)) * static_cast<double>(levels));
}

double total_time_prediction(double sites, double beta, double h_norm, double eps_bar) {
  if (!(sites >= 1.0) || !(beta > 0.0) || h_norm < 0.0 || !(eps_bar > 0.0)) {
    throw ParameterError("total_time_prediction: arguments must be positive");
  }
  return beta * std::pow(sites, beta * h_norm) / (eps_bar * eps_bar);
}

double d_dim_prediction(double sites, int dimension, double beta, double h_norm, double eps_bar) {
  if (!(sites >= 1.0) || dimension < 1 || !(beta > 0.0) || h_norm < 0.0 || !(eps_bar > 0.0)) {
    throw ParameterError("d_dim_prediction: arguments must be positive");
  }
  const double exponent = 2.0 * beta * h_norm * dimension * std::pow(sites, dimension - 1);
  return beta * std::exp(exponent) / (eps_bar * eps_bar);
}

}  // namespace thermoprep
