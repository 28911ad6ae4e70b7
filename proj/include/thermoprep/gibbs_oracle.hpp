#pragma once

// Exact thermal states and the first-order Dyson terms they are compared
// against. All integrals are evaluated in closed form in the eigenbasis of H.

#include "thermoprep/operator_core.hpp"

namespace thermoprep {

/// exp(-beta_tilde H) / Z with Z = Tr exp(-beta H) held fixed at the family's beta.
class GibbsFamily {
 public:
  GibbsFamily(HermitianOperator hamiltonian, double beta);

  const HermitianOperator& hamiltonian() const { return hamiltonian_; }
  double beta() const { return beta_; }
  /// log Z; Z itself can overflow for large beta * |E_min|.
  double log_partition_function() const { return log_z_; }
  double partition_function() const;

  /// p_k = exp(-beta E_k) / Z for each merged level k of H.
  const RealVector& level_weights() const { return level_weights_; }

  /// exp(-beta_tilde H) / Z, 0 <= beta_tilde <= beta.
  Matrix intermediate(double beta_tilde) const;
  DensityMatrix state() const;

 private:
  HermitianOperator hamiltonian_;
  double beta_;
  double log_z_;
  RealVector level_weights_;
};

/// Sum_k exp(-beta E_k) P_k / Z. Throws ParameterError for beta <= 0.
DensityMatrix gibbs_state(const HermitianOperator& hamiltonian, double beta);

/// Coefficient of epsilon in exp(-beta (H + eps h)) / Z(H):
/// -int_0^beta rho(beta - b) h rho(b) db.
Matrix dyson_imaginary_first_order(const HermitianOperator& hamiltonian, const HermitianOperator& h,
                                   double beta);

/// The same first-order term assembled from eigenprojectors,
///   -sum_k p_k ( beta P_k h P_k + sum_{l != k} (P_l h P_k + P_k h P_l) / (E_l - E_k) ).
/// Throws NumericalError if two levels of H are closer than `min_gap`
/// (default: the default degeneracy tolerance of H's spectral range); such
/// operators must be re-decomposed with a coarser tolerance first.
Matrix first_order_projector_form(const HermitianOperator& hamiltonian, const HermitianOperator& h,
                                  double beta, double min_gap = 0.0);

struct RealTimeDysonTerms {
  Matrix u0;       // exp(-i H t)
  Matrix a;        // int_0^t U0(t - s) h U0(s) ds
  double b_bound;  // bound on ||B(t)||: t^2 ||h||^2 / 2
};

/// U_eps(t) = U0(t) - i eps A(t) - eps^2 B(t).
RealTimeDysonTerms dyson_real_time_terms(const HermitianOperator& hamiltonian, const HermitianOperator& h,
                                         double t);

}  // namespace thermoprep
