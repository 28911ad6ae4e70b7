#pragma once

// Open 1D chains: on-site terms plus nearest-neighbour links, and the block /
// link operators consumed by the binary merge recursion.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "thermoprep/operator_core.hpp"

namespace thermoprep {

struct ChainModel {
  std::string name;
  std::size_t sites = 1;
  Index local_dim = 2;
  std::vector<Matrix> site_terms;  // sites entries, local_dim x local_dim
  std::vector<Matrix> link_terms;  // sites-1 entries, local_dim^2 x local_dim^2; link i joins sites i, i+1
  std::map<std::string, double> couplings;

  /// Throws ValidationError on inconsistent shapes or non-Hermitian terms.
  void validate() const;

  /// max over links of the operator norm of the PSD-shifted link term,
  /// i.e. the largest spectral width of any link.
  double link_norm_bound() const;

  /// Hilbert-space dimension of sites first..last.
  Index block_dim(std::size_t first, std::size_t last) const;
  std::vector<Index> site_dims() const;
};

/// H = -J sum Z_i Z_{i+1} - g sum X_i - hz sum Z_i.
ChainModel transverse_field_ising(std::size_t sites, double J, double g, double hz = 0.0);
/// H = J sum (X X + Y Y + Z Z)_{i,i+1} - hz sum Z_i.
ChainModel heisenberg(std::size_t sites, double J, double hz = 0.0);
/// Independent GUE-like site and link terms drawn from `seed`.
ChainModel random_nearest_neighbor(std::size_t sites, Index local_dim, std::uint64_t seed,
                                   double scale = 1.0);

/// Sum of site terms on first..last and the links strictly inside the block.
HermitianOperator build_block_hamiltonian(const ChainModel& model, std::size_t first, std::size_t last);

/// The link joining sites boundary and boundary+1, embedded in the block
/// first..last (which must contain both sites).
HermitianOperator link_term(const ChainModel& model, std::size_t boundary, std::size_t first,
                            std::size_t last);

struct ShiftedOperator {
  HermitianOperator shifted;  // h - shift * I, smallest eigenvalue 0
  double shift;               // smallest eigenvalue of the input
};

ShiftedOperator shift_psd(const HermitianOperator& h);

/// shift_psd applied to the local link term before embedding (same spectrum,
/// cheaper than decomposing the embedded operator twice).
ShiftedOperator shifted_link_term(const ChainModel& model, std::size_t boundary, std::size_t first,
                                  std::size_t last);

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
}  // namespace pauli

}  // namespace thermoprep
