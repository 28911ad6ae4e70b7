#pragma once

// Slow, independent evaluations used to check the closed-form paths. Nothing
// here touches HermitianOperator's eigendecomposition.

#include <cstddef>
#include <span>

#include "thermoprep/operator_core.hpp"
#include "thermoprep/random.hpp"

namespace thermoprep::reference {

/// exp(a) by scaling and squaring with a degree-30 Taylor polynomial.
Matrix taylor_expm(const Matrix& a);

/// exp(-beta H) / Tr exp(-beta H) via taylor_expm (H shifted by its diagonal minimum first).
Matrix gibbs_matrix(const Matrix& h, double beta);

/// -int_0^beta exp(-(beta - b) H) h exp(-b H) db / Tr exp(-beta H), by
/// composite Gauss-Legendre quadrature with `panels` panels.
Matrix dyson_imaginary_quadrature(const Matrix& hamiltonian, const Matrix& h, double beta, std::size_t panels = 16);

/// int_0^t U0(t - s) h U0(s) ds with U0(s) = exp(-i H s), by composite Gauss-Legendre quadrature.
Matrix dyson_real_time_quadrature(const Matrix& hamiltonian, const Matrix& h, double t, std::size_t panels = 16);

/// Gaussian time average of exp(-i g t) rho exp(i g t), t ~ N(0, sigma^2),
/// by the trapezoid rule on |t| <= truncation * sigma with `nodes` points.
Matrix dephase_gaussian_quadrature(const Matrix& rho, const Matrix& g, double sigma, std::size_t nodes,
                                   double truncation);

/// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm_hermitian(const Matrix& a);

struct SuccessRunEstimate {
  double mean_steps = 0.0;
  double steps_stderr = 0.0;
  double mean_failures = 0.0;
  double failures_stderr = 0.0;
};

/// Direct simulation of the success-run process: attempt steps 0..n-1 in
/// order, restarting from step 0 after any failure.
SuccessRunEstimate success_run_monte_carlo(std::span<const double> step_success, std::size_t trials,
                                           RandomStream& rng);

struct SuccessRunValues {
  double mean_steps = 0.0;
  double mean_failures = 0.0;
};

/// Homogeneous closed form: m = (1 - p^n) / (p^n (1 - p)), alpha = (1 - p) m.
SuccessRunValues success_run_closed_form(double p, std::size_t n_steps);

/// Charged time of one step, written out independently of cost_model.
double step_time_reference(double eps, double beta, double h_norm);

}  // namespace thermoprep::reference
