#include "thermoprep/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "thermoprep/errors.hpp"

#ifdef THERMOPREP_HAVE_LAPACKE
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace thermoprep {

struct HermitianOperator::Spectrum {
  RealVector values;
  Matrix vectors;
  std::vector<SpectralLevel> levels;
  std::vector<Index> level_of_column;
  double tol = 0.0;
};

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw ValidationError(os.str());
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entries");
}

void require_hermitian(const Matrix& m, const char* what) {
  require_square(m, what);
  require_finite(m, what);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol * scale) {
    std::ostringstream os;
    os << what << ": matrix is not Hermitian (max |A - A^dagger| = " << asym << ")";
    throw ValidationError(os.str());
  }
}

// Ascending eigenvalues, and eigenvectors as columns when `vectors` is non-null.
void hermitian_eigensolve(const Matrix& a, RealVector& values, Matrix* vectors) {
#ifdef THERMOPREP_HAVE_LAPACKE
  Matrix work = a;
  values.resize(a.rows());
  const auto n = static_cast<lapack_int>(a.rows());
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n, work.data(), n, values.data());
  if (info != 0) throw NumericalError("hermitian eigensolver failed (zheevd info " + std::to_string(info) + ")");
  if (vectors) *vectors = std::move(work);
#else
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian eigensolver failed");
  values = solver.eigenvalues();
  if (vectors) *vectors = solver.eigenvectors();
#endif
}

// Chains consecutive eigenvalues whose gap is within tol.
std::vector<SpectralLevel> group_levels(const RealVector& values, double tol) {
  std::vector<SpectralLevel> levels;
  Index start = 0;
  for (Index i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values[i] - values[i - 1] > tol) {
      const Index count = i - start;
      const double mean = values.segment(start, count).mean();
      levels.push_back({mean, start, count});
      start = i;
    }
  }
  return levels;
}

}  // namespace

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianOperator::HermitianOperator(Matrix entries, double degeneracy_tol) {
  require_hermitian(entries, "HermitianOperator");
  entries_ = hermitian_part(entries);

  auto spectrum = std::make_shared<Spectrum>();
  hermitian_eigensolve(entries_, spectrum->values, &spectrum->vectors);

  const double range = spectrum->values[spectrum->values.size() - 1] - spectrum->values[0];
  if (degeneracy_tol > 0.0) {
    spectrum->tol = degeneracy_tol;
  } else {
    // Exactly flat spectra still need a positive tolerance to merge roundoff.
    const double scale = range > 0.0 ? range : std::max(1.0, std::abs(spectrum->values[0]));
    spectrum->tol = kDefaultRelativeDegeneracyTol * scale;
  }
  spectrum->levels = group_levels(spectrum->values, spectrum->tol);
  spectrum->level_of_column.resize(static_cast<std::size_t>(entries_.rows()));
  for (std::size_t k = 0; k < spectrum->levels.size(); ++k) {
    const auto& lvl = spectrum->levels[k];
    for (Index c = lvl.first; c < lvl.first + lvl.count; ++c) {
      spectrum->level_of_column[static_cast<std::size_t>(c)] = static_cast<Index>(k);
    }
  }
  spectrum_ = std::move(spectrum);
}

HermitianOperator HermitianOperator::zero(Index dim) {
  return HermitianOperator(Matrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(Index dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
  Matrix m = Matrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Index>(i), static_cast<Index>(i)) = values[i];
  }
  return HermitianOperator(std::move(m));
}

const RealVector& HermitianOperator::eigenvalues() const { return spectrum_->values; }
const Matrix& HermitianOperator::eigenvectors() const { return spectrum_->vectors; }
std::span<const SpectralLevel> HermitianOperator::levels() const { return spectrum_->levels; }
double HermitianOperator::degeneracy_tol() const { return spectrum_->tol; }
std::span<const Index> HermitianOperator::level_of_column() const {
  return spectrum_->level_of_column;
}

Matrix HermitianOperator::projector(std::size_t level) const {
  const auto& lvl = spectrum_->levels.at(level);
  const auto block = spectrum_->vectors.middleCols(lvl.first, lvl.count);
  return block * block.adjoint();
}

double HermitianOperator::min_eigenvalue() const { return spectrum_->values[0]; }
double HermitianOperator::max_eigenvalue() const {
  return spectrum_->values[spectrum_->values.size() - 1];
}
double HermitianOperator::operator_norm() const {
  return std::max(std::abs(min_eigenvalue()), std::abs(max_eigenvalue()));
}

Matrix HermitianOperator::to_eigenbasis(const Matrix& m) const {
  return spectrum_->vectors.adjoint() * m * spectrum_->vectors;
}

Matrix HermitianOperator::from_eigenbasis(const Matrix& m) const {
  return spectrum_->vectors * m * spectrum_->vectors.adjoint();
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw ValidationError("operator+: dimension mismatch");
  return HermitianOperator(a.matrix() + b.matrix());
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw ValidationError("operator-: dimension mismatch");
  return HermitianOperator(a.matrix() - b.matrix());
}

HermitianOperator operator*(double s, const HermitianOperator& a) {
  return HermitianOperator(s * a.matrix());
}

DensityMatrix::DensityMatrix(Matrix entries) {
  require_hermitian(entries, "DensityMatrix");
  entries_ = hermitian_part(entries);
  const double tr = entries_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " differs from 1";
    throw ValidationError(os.str());
  }
  RealVector values;
  hermitian_eigensolve(entries_, values, nullptr);
  const double min_eig = values[0];
  if (min_eig < -kPositivityTol) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << min_eig;
    throw ValidationError(os.str());
  }
}

DensityMatrix DensityMatrix::from_positive_map(const Matrix& entries) {
  require_hermitian(entries, "DensityMatrix");
  const double tr = entries.trace().real();
  if (!(tr > 0.0)) throw NumericalError("DensityMatrix: non-positive trace");
  return DensityMatrix(hermitian_part(entries) / tr, Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw ValidationError("DensityMatrix::pure: zero vector");
  const ComplexVector v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

std::vector<SpectralComponent> spectral_decompose(const HermitianOperator& a) {
  std::vector<SpectralComponent> out;
  out.reserve(a.levels().size());
  for (std::size_t k = 0; k < a.levels().size(); ++k) {
    out.push_back({a.levels()[k].energy, a.projector(k)});
  }
  return out;
}

std::vector<SpectralComponent> spectral_decompose(const HermitianOperator& a, double degeneracy_tol) {
  if (!(degeneracy_tol > 0.0)) throw ParameterError("spectral_decompose: degeneracy_tol must be > 0");
  return spectral_decompose(HermitianOperator(a.matrix(), degeneracy_tol));
}

HermitianOperator matrix_exp_hermitian(const HermitianOperator& a, double scalar) {
  const double top = std::max(scalar * a.min_eigenvalue(), scalar * a.max_eigenvalue());
  if (top > 700.0) {
    std::ostringstream os;
    os << "matrix_exp_hermitian: exponent " << top << " overflows; shift the operator first";
    throw NumericalError(os.str());
  }
  return HermitianOperator(a.spectral_map([scalar](double e) { return std::exp(scalar * e); }));
}

Matrix unitary_exp(const HermitianOperator& a, double scalar) {
  return a.spectral_map([scalar](double e) { return std::polar(1.0, scalar * e); });
}

double trace_norm(const Matrix& a) {
  require_finite(a, "trace_norm");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

double operator_norm(const Matrix& a) {
  require_finite(a, "operator_norm");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()[0];
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ValidationError("trace_distance: dimension mismatch");
  return 0.5 * trace_norm(rho.matrix() - sigma.matrix());
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(tensor_product(a.matrix(), b.matrix()));
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::from_positive_map(tensor_product(a.matrix(), b.matrix()));
}

Matrix embed_local(const Matrix& term, SiteRange range, std::span<const Index> site_dims) {
  if (range.first > range.last || range.last >= site_dims.size()) {
    std::ostringstream os;
    os << "embed_local: site range [" << range.first << ", " << range.last << "] outside chain of "
       << site_dims.size() << " sites";
    throw std::out_of_range(os.str());
  }
  const auto product = [&](std::size_t lo, std::size_t hi) {
    Index d = 1;
    for (std::size_t s = lo; s < hi; ++s) d *= site_dims[s];
    return d;
  };
  const Index left = product(0, range.first);
  const Index local = product(range.first, range.last + 1);
  const Index right = product(range.last + 1, site_dims.size());
  if (term.rows() != local || term.cols() != local) {
    std::ostringstream os;
    os << "embed_local: term is " << term.rows() << "x" << term.cols() << " but sites span dimension "
       << local;
    throw ValidationError(os.str());
  }
  Matrix out = tensor_product(Matrix::Identity(left, left), term);
  return tensor_product(out, Matrix::Identity(right, right));
}

HermitianOperator embed_local(const HermitianOperator& term, SiteRange range,
                              std::span<const Index> site_dims) {
  return HermitianOperator(embed_local(term.matrix(), range, site_dims));
}

}  // namespace thermoprep
