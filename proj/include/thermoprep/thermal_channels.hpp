#pragma once

// The two halves of one perturbative update: the post-selected conjugation by
// K = I - eps*beta*h/2, and dephasing in the eigenbasis of the updated
// Hamiltonian. Each comes in an ideal and an imperfect fidelity.

#include <cstddef>

#include "thermoprep/operator_core.hpp"

namespace thermoprep {

enum class FidelityMode { ideal, imperfect };

struct QuadratureSpec {
  std::size_t nodes = 2000;  // time nodes for the explicit Gaussian average
  double truncation = 8.0;   // integrate over |t| <= truncation * sigma
};

struct ChannelFidelity {
  FidelityMode mode = FidelityMode::ideal;
  double delta = 0.0;     // phase-estimation accuracy, in units of t * energy
  double pe_time = 0.0;   // t of the phase-estimated unitary exp(2 pi i h t); 1/t > ||h||
  double eps_pe = 0.0;    // phase-estimation leakage bound
  double zeta = 0.0;      // dephasing accuracy (energy)
  double c = 1.0;         // sigma = c / zeta
  QuadratureSpec quadrature;

  double sigma() const { return c / zeta; }
  /// Width of one phase-estimation energy bin, delta / t.
  double bin_width() const { return delta / pe_time; }

  /// Ideal fidelity ignores every other field. Imperfect requires delta,
  /// pe_time, zeta > 0, 0 <= eps_pe < 1 and c >= 1.
  void validate() const;
};

/// Trace-norm error contributions reported by the imperfect conjugation.
struct ConjugationErrors {
  double pe_binning = 0.0;  // eps * beta * delta
  double pe_leakage = 0.0;  // 2 * eps_pe, never sampled
};

struct ConjugationResult {
  DensityMatrix state;
  double success_probability;
  double evolution_time_charged;
  ConjugationErrors errors;
  bool coarse_grid = false;  // delta >= t ||h||: every eigenvalue shares one bin
};

/// rho -> K rho K / Tr(K rho K), K = I - eps*beta*h/2. Requires h >= 0 and
/// eps*beta*||h|| <= 1.
ConjugationResult conjugation_ideal(const DensityMatrix& rho, const HermitianOperator& h_shifted, double eps,
                                    double beta);

/// As conjugation_ideal, with each eigenvalue of h replaced by the lower edge
/// of its phase-estimation bin (grid spacing delta / t).
ConjugationResult conjugation_binned(const DensityMatrix& rho, const HermitianOperator& h_shifted, double eps,
                                     double beta, const ChannelFidelity& fidelity);

/// Sum_k P_k rho P_k over the eigenspaces of g.
DensityMatrix dephase_ideal(const DensityMatrix& rho, const HermitianOperator& g);

/// Gaussian time average of exp(-i g t) rho exp(i g t) with standard deviation
/// sigma, evaluated exactly: coherences between levels E_j, E_k are scaled by
/// exp(-sigma^2 (E_j - E_k)^2 / 2).
DensityMatrix dephase_gaussian(const DensityMatrix& rho, const HermitianOperator& g, double sigma);
DensityMatrix dephase_gaussian(const DensityMatrix& rho, const HermitianOperator& g,
                               const ChannelFidelity& fidelity);

/// Keeps only the blocks P_k sigma P_j with |E_k - E_j| <= zeta. This is the
/// analysis model of finite dephasing accuracy; it need not preserve positivity.
Matrix dephase_windowed(const Matrix& sigma, const HermitianOperator& g, double zeta);

enum class BinningRule {
  greedy,  // bins opened at the lowest unbinned eigenvalue, closed once spread reaches zeta
  grid,    // bins [E_min + j zeta, E_min + (j+1) zeta)
};

struct BinnedHamiltonian {
  HermitianOperator binned;  // H~, eigenvalues replaced by bin minima
  HermitianOperator chi;     // H~ - g, ||chi|| < zeta
};

/// Groups the spectrum of g into bins of width below zeta so that distinct
/// eigenvalues of H~ are at least zeta apart.
BinnedHamiltonian binned_hamiltonian(const HermitianOperator& g, double zeta,
                                     BinningRule rule = BinningRule::greedy);

}  // namespace thermoprep
