#pragma once

// Dense Hermitian and density-matrix arithmetic. Every matrix function goes
// through the spectral decomposition; units are dimensionless (hbar = k_B = 1).

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace thermoprep {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Relative degeneracy tolerance applied to the spectral range when none is given.
inline constexpr double kDefaultRelativeDegeneracyTol = 1e-8;

/// Elementwise tolerance for the Hermiticity check, scaled by max(1, max |a_ij|).
inline constexpr double kHermitianTol = 1e-12;

/// One eigenspace of a HermitianOperator: merged eigenvalue and the columns of
/// the eigenvector matrix spanning it.
struct SpectralLevel {
  double energy;
  Index first;
  Index count;
};

struct SpectralComponent {
  double eigenvalue;
  Matrix projector;
};

/// Dense complex Hermitian matrix with its spectral decomposition computed at
/// construction. Copies share the (immutable) decomposition.
class HermitianOperator {
 public:
  /// Validates Hermiticity and decomposes. `degeneracy_tol <= 0` selects the
  /// default 1e-8 * (spectral range).
  explicit HermitianOperator(Matrix entries, double degeneracy_tol = 0.0);

  static HermitianOperator zero(Index dim);
  static HermitianOperator identity(Index dim);
  static HermitianOperator diagonal(std::span<const double> values);

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

  /// Individual eigenvalues, ascending.
  const RealVector& eigenvalues() const;
  /// Orthonormal eigenvectors as columns, matching eigenvalues().
  const Matrix& eigenvectors() const;

  /// Eigenspaces after merging eigenvalues closer than degeneracy_tol().
  std::span<const SpectralLevel> levels() const;
  double degeneracy_tol() const;
  /// Level index of every eigenvector column.
  std::span<const Index> level_of_column() const;

  Matrix projector(std::size_t level) const;

  double min_eigenvalue() const;
  double max_eigenvalue() const;
  double spectral_range() const { return max_eigenvalue() - min_eigenvalue(); }
  double operator_norm() const;

  /// V diag(f(E_i)) V^dagger, f applied to individual eigenvalues.
  template <class F>
  Matrix spectral_map(F&& f) const {
    const auto& vecs = eigenvectors();
    const auto& vals = eigenvalues();
    ComplexVector diag(vals.size());
    for (Index i = 0; i < vals.size(); ++i) diag[i] = Complex(f(vals[i]));
    return vecs * diag.asDiagonal() * vecs.adjoint();
  }

  /// Express a matrix in this operator's eigenbasis, and back.
  Matrix to_eigenbasis(const Matrix& m) const;
  Matrix from_eigenbasis(const Matrix& m) const;

 private:
  struct Spectrum;
  Matrix entries_;
  std::shared_ptr<const Spectrum> spectrum_;
};

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator*(double s, const HermitianOperator& a);

/// Positive semidefinite, unit-trace complex matrix.
class DensityMatrix {
 public:
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-10;

  explicit DensityMatrix(Matrix entries);

  static DensityMatrix maximally_mixed(Index dim);
  static DensityMatrix pure(const ComplexVector& psi);
  /// Hermitian part of `entries` rescaled to unit trace, without the
  /// positivity check. For outputs of maps that are positive by construction
  /// (Kraus conjugation, unitary mixtures, tensor products).
  static DensityMatrix from_positive_map(const Matrix& entries);

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

 private:
  struct Unchecked {};
  DensityMatrix(Matrix entries, Unchecked) : entries_(std::move(entries)) {}
  Matrix entries_;
};

/// Returns (M + M^dagger)/2.
Matrix hermitian_part(const Matrix& m);

/// Merged eigenvalues and their projectors.
std::vector<SpectralComponent> spectral_decompose(const HermitianOperator& a);
/// Re-decomposes `a` with an explicit degeneracy tolerance.
std::vector<SpectralComponent> spectral_decompose(const HermitianOperator& a, double degeneracy_tol);

/// Sum_k exp(scalar * E_k) P_k. Throws NumericalError if scalar*E_k > 700.
HermitianOperator matrix_exp_hermitian(const HermitianOperator& a, double scalar);
/// Sum_k exp(i * scalar * E_k) P_k, e.g. exp(-iHt) = unitary_exp(H, -t).
Matrix unitary_exp(const HermitianOperator& a, double scalar);

/// Sum of singular values.
double trace_norm(const Matrix& a);
/// Largest singular value.
double operator_norm(const Matrix& a);
/// 1/2 ||rho - sigma||_tr.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

Matrix tensor_product(const Matrix& a, const Matrix& b);
HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b);
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

/// Inclusive range of chain sites.
struct SiteRange {
  std::size_t first;
  std::size_t last;
};

/// Pads `term` (acting on sites range.first..range.last) with identities on the
/// other sites of a chain with per-site dimensions `site_dims`.
Matrix embed_local(const Matrix& term, SiteRange range, std::span<const Index> site_dims);
HermitianOperator embed_local(const HermitianOperator& term, SiteRange range,
                              std::span<const Index> site_dims);

}  // namespace thermoprep
