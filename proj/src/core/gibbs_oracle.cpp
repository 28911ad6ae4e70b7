#include "thermoprep/gibbs_oracle.hpp"

#include <cmath>
#include <sstream>

#include "thermoprep/errors.hpp"

namespace thermoprep {

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << "inverse temperature must be positive and finite, got " << beta;
    throw ParameterError(os.str());
  }
}

void require_same_dim(const HermitianOperator& a, const HermitianOperator& b, const char* what) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw ValidationError(os.str());
  }
}

// -(p_a - p_b) / (E_b - E_a) for a level pair written with the lower level a
// and gap >= 0; limit -beta p_a at zero gap.
double pair_coefficient(double p_low, double gap, double beta) {
  if (gap * beta < 1e-12) return -beta * p_low;
  return p_low * std::expm1(-beta * gap) / gap;
}

}  // namespace

GibbsFamily::GibbsFamily(HermitianOperator hamiltonian, double beta)
    : hamiltonian_(std::move(hamiltonian)), beta_(beta) {
  require_beta(beta);
  const auto& ev = hamiltonian_.eigenvalues();
  const double e0 = ev[0];
  double z_shifted = 0.0;
  for (Index i = 0; i < ev.size(); ++i) z_shifted += std::exp(-beta_ * (ev[i] - e0));
  log_z_ = -beta_ * e0 + std::log(z_shifted);

  const auto levels = hamiltonian_.levels();
  level_weights_.resize(static_cast<Index>(levels.size()));
  for (std::size_t k = 0; k < levels.size(); ++k) {
    level_weights_[static_cast<Index>(k)] = std::exp(-beta_ * (levels[k].energy - e0)) / z_shifted;
  }
}

double GibbsFamily::partition_function() const { return std::exp(log_z_); }

Matrix GibbsFamily::intermediate(double beta_tilde) const {
  if (beta_tilde < 0.0 || beta_tilde > beta_ * (1.0 + 1e-12)) {
    throw ParameterError("GibbsFamily::intermediate: beta_tilde outside [0, beta]");
  }
  const double lz = log_z_;
  return hamiltonian_.spectral_map([beta_tilde, lz](double e) { return std::exp(-beta_tilde * e - lz); });
}

DensityMatrix GibbsFamily::state() const {
  const auto& ev = hamiltonian_.eigenvalues();
  const double e0 = ev[0];
  const double b = beta_;
  Matrix rho = hamiltonian_.spectral_map([b, e0](double e) { return std::exp(-b * (e - e0)); });
  rho /= rho.trace().real();
  return DensityMatrix(hermitian_part(rho));
}

DensityMatrix gibbs_state(const HermitianOperator& hamiltonian, double beta) {
  return GibbsFamily(hamiltonian, beta).state();
}

Matrix dyson_imaginary_first_order(const HermitianOperator& hamiltonian, const HermitianOperator& h,
                                   double beta) {
  require_same_dim(hamiltonian, h, "dyson_imaginary_first_order");
  const GibbsFamily family(hamiltonian, beta);
  const auto levels = hamiltonian.levels();
  const auto level_of = hamiltonian.level_of_column();
  const auto& p = family.level_weights();

  Matrix hk = hamiltonian.to_eigenbasis(h.matrix());
  for (Index j = 0; j < hk.cols(); ++j) {
    for (Index i = 0; i < hk.rows(); ++i) {
      const Index li = level_of[static_cast<std::size_t>(i)];
      const Index lj = level_of[static_cast<std::size_t>(j)];
      const Index low = std::min(li, lj);
      const Index high = std::max(li, lj);
      const double gap = levels[static_cast<std::size_t>(high)].energy - levels[static_cast<std::size_t>(low)].energy;
      hk(i, j) *= pair_coefficient(p[low], low == high ? 0.0 : gap, beta);
    }
  }
  return hamiltonian.from_eigenbasis(hk);
}

Matrix first_order_projector_form(const HermitianOperator& hamiltonian, const HermitianOperator& h,
                                  double beta, double min_gap) {
  require_same_dim(hamiltonian, h, "first_order_projector_form");
  const GibbsFamily family(hamiltonian, beta);
  const auto levels = hamiltonian.levels();
  const auto& p = family.level_weights();

  const double guard = min_gap > 0.0 ? min_gap : kDefaultRelativeDegeneracyTol * hamiltonian.spectral_range();
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (levels[k].energy - levels[k - 1].energy < guard) {
      std::ostringstream os;
      os << "first_order_projector_form: levels " << k - 1 << " and " << k << " are "
         << levels[k].energy - levels[k - 1].energy << " apart (< " << guard
         << "); re-decompose H with a larger degeneracy tolerance";
      throw NumericalError(os.str());
    }
  }

  std::vector<Matrix> projectors;
  projectors.reserve(levels.size());
  for (std::size_t k = 0; k < levels.size(); ++k) projectors.push_back(hamiltonian.projector(k));

  const Index dim = hamiltonian.dim();
  Matrix result = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const Matrix h_pk = h.matrix() * projectors[k];
    const Matrix pk_h = projectors[k] * h.matrix();
    Matrix term = beta * projectors[k] * h_pk;
    for (std::size_t l = 0; l < levels.size(); ++l) {
      if (l == k) continue;
      const double denom = levels[l].energy - levels[k].energy;
      term += (projectors[l] * h_pk + pk_h * projectors[l]) / denom;
    }
    result -= p[static_cast<Index>(k)] * term;
  }
  return result;
}

RealTimeDysonTerms dyson_real_time_terms(const HermitianOperator& hamiltonian, const HermitianOperator& h,
                                         double t) {
  require_same_dim(hamiltonian, h, "dyson_real_time_terms");
  if (!std::isfinite(t)) throw ParameterError("dyson_real_time_terms: t must be finite");
  const auto& ev = hamiltonian.eigenvalues();

  // A_jk = h_jk * t * sinc((E_j - E_k) t / 2) * exp(-i (E_j + E_k) t / 2) in the eigenbasis.
  Matrix a = hamiltonian.to_eigenbasis(h.matrix());
  for (Index k = 0; k < a.cols(); ++k) {
    for (Index j = 0; j < a.rows(); ++j) {
      const double half = 0.5 * (ev[j] - ev[k]) * t;
      const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
      a(j, k) *= t * sinc * std::polar(1.0, -0.5 * (ev[j] + ev[k]) * t);
    }
  }

  const double hn = h.operator_norm();
  return {unitary_exp(hamiltonian, -t), hamiltonian.from_eigenbasis(a), 0.5 * t * t * hn * hn};
}

}  // namespace thermoprep
