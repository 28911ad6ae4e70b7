#include "thermoprep/thermal_channels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thermoprep/cost_model.hpp"
#include "thermoprep/errors.hpp"

namespace thermoprep {

namespace {

constexpr double kPsdTol = 1e-10;

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ValidationError(os.str());
  }
}

double check_conjugation_args(const DensityMatrix& rho, const HermitianOperator& h, double eps, double beta) {
  require_same_dim(rho.dim(), h.dim(), "conjugation");
  if (h.min_eigenvalue() < -kPsdTol) throw ParameterError("conjugation: h must be positive semidefinite");
  if (!(eps >= 0.0) || !(beta > 0.0)) throw ParameterError("conjugation: need eps >= 0 and beta > 0");
  const double h_norm = h.max_eigenvalue();
  if (eps * beta * h_norm > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "conjugation: eps*beta*||h|| = " << eps * beta * h_norm << " exceeds 1";
    throw ParameterError(os.str());
  }
  return h_norm;
}

// K rho K / Tr(K rho K) for K diagonal in h's eigenbasis with entries kdiag.
ConjugationResult apply_kraus(const DensityMatrix& rho, const HermitianOperator& h, const RealVector& kdiag) {
  const Matrix& v = h.eigenvectors();
  const Matrix kraus = v * kdiag.cast<Complex>().asDiagonal() * v.adjoint();
  const Matrix post = kraus * rho.matrix() * kraus;
  // K <= I, so anything above one is roundoff.
  const double p = std::min(1.0, post.trace().real());
  if (!(p > 0.0)) throw NumericalError("conjugation: post-selection probability vanished");
  return {DensityMatrix::from_positive_map(post), p, 0.0, {}, false};
}

// Weighted coherence mask in g's eigenbasis; weight(level_i, level_j).
template <class W>
Matrix mask_in_eigenbasis(const Matrix& m, const HermitianOperator& g, W&& weight) {
  const auto level_of = g.level_of_column();
  Matrix mk = g.to_eigenbasis(m);
  for (Index j = 0; j < mk.cols(); ++j) {
    for (Index i = 0; i < mk.rows(); ++i) {
      const Index li = level_of[static_cast<std::size_t>(i)];
      const Index lj = level_of[static_cast<std::size_t>(j)];
      if (li != lj) mk(i, j) *= weight(li, lj);
    }
  }
  return g.from_eigenbasis(mk);
}

}  // namespace

void ChannelFidelity::validate() const {
  if (mode == FidelityMode::ideal) return;
  std::ostringstream os;
  if (!(delta > 0.0)) os << "delta must be > 0; ";
  if (!(pe_time > 0.0)) os << "pe_time must be > 0; ";
  if (!(zeta > 0.0)) os << "zeta must be > 0; ";
  if (!(eps_pe >= 0.0 && eps_pe < 1.0)) os << "eps_pe must lie in [0, 1); ";
  if (!(c >= 1.0)) os << "c must be >= 1; ";
  if (quadrature.nodes < 2 || !(quadrature.truncation > 0.0)) os << "quadrature spec invalid; ";
  if (!os.str().empty()) throw ParameterError("imperfect fidelity: " + os.str());
}

ConjugationResult conjugation_ideal(const DensityMatrix& rho, const HermitianOperator& h_shifted, double eps,
                                    double beta) {
  const double h_norm = check_conjugation_args(rho, h_shifted, eps, beta);
  const RealVector kdiag = (1.0 - 0.5 * eps * beta * h_shifted.eigenvalues().array()).matrix();
  auto result = apply_kraus(rho, h_shifted, kdiag);
  result.evolution_time_charged = conjugation_time(eps, beta, h_norm);
  return result;
}

ConjugationResult conjugation_binned(const DensityMatrix& rho, const HermitianOperator& h_shifted, double eps,
                                     double beta, const ChannelFidelity& fidelity) {
  if (fidelity.mode != FidelityMode::imperfect) {
    throw ParameterError("conjugation_binned: requires imperfect fidelity");
  }
  fidelity.validate();
  const double h_norm = check_conjugation_args(rho, h_shifted, eps, beta);
  const double width = fidelity.bin_width();

  const RealVector& ev = h_shifted.eigenvalues();
  RealVector kdiag(ev.size());
  for (Index i = 0; i < ev.size(); ++i) {
    const double e = std::max(0.0, ev[i]);
    const double representative = width * std::floor(e / width);
    kdiag[i] = 1.0 - 0.5 * eps * beta * representative;
  }
  auto result = apply_kraus(rho, h_shifted, kdiag);
  result.evolution_time_charged = conjugation_time(eps, beta, h_norm);
  result.errors.pe_binning = eps * beta * fidelity.delta;
  result.errors.pe_leakage = 2.0 * fidelity.eps_pe;
  result.coarse_grid = fidelity.delta >= fidelity.pe_time * h_norm;
  return result;
}

DensityMatrix dephase_ideal(const DensityMatrix& rho, const HermitianOperator& g) {
  require_same_dim(rho.dim(), g.dim(), "dephase_ideal");
  return DensityMatrix::from_positive_map(mask_in_eigenbasis(rho.matrix(), g, [](Index, Index) { return 0.0; }));
}

DensityMatrix dephase_gaussian(const DensityMatrix& rho, const HermitianOperator& g, double sigma) {
  require_same_dim(rho.dim(), g.dim(), "dephase_gaussian");
  if (!(sigma > 0.0)) throw ParameterError("dephase_gaussian: sigma must be > 0");
  const auto levels = g.levels();
  const Matrix out = mask_in_eigenbasis(rho.matrix(), g, [&](Index a, Index b) {
    const double gap = levels[static_cast<std::size_t>(a)].energy - levels[static_cast<std::size_t>(b)].energy;
    return std::exp(-0.5 * sigma * sigma * gap * gap);
  });
  return DensityMatrix::from_positive_map(out);
}

DensityMatrix dephase_gaussian(const DensityMatrix& rho, const HermitianOperator& g,
                               const ChannelFidelity& fidelity) {
  if (fidelity.mode == FidelityMode::ideal) return dephase_ideal(rho, g);
  fidelity.validate();
  return dephase_gaussian(rho, g, fidelity.sigma());
}

Matrix dephase_windowed(const Matrix& sigma, const HermitianOperator& g, double zeta) {
  require_same_dim(sigma.rows(), g.dim(), "dephase_windowed");
  if (!(zeta >= 0.0)) throw ParameterError("dephase_windowed: zeta must be >= 0");
  const auto levels = g.levels();
  return mask_in_eigenbasis(sigma, g, [&](Index a, Index b) {
    const double gap = levels[static_cast<std::size_t>(a)].energy - levels[static_cast<std::size_t>(b)].energy;
    return std::abs(gap) <= zeta ? 1.0 : 0.0;
  });
}

BinnedHamiltonian binned_hamiltonian(const HermitianOperator& g, double zeta, BinningRule rule) {
  if (!(zeta > 0.0)) throw ParameterError("binned_hamiltonian: zeta must be > 0");
  const RealVector& ev = g.eigenvalues();
  RealVector rep(ev.size());
  const double e_min = ev[0];
  double bin_start = e_min;
  for (Index i = 0; i < ev.size(); ++i) {
    if (rule == BinningRule::greedy) {
      if (ev[i] - bin_start >= zeta) bin_start = ev[i];
      rep[i] = bin_start;
    } else {
      rep[i] = e_min + zeta * std::floor((ev[i] - e_min) / zeta);
      if (rep[i] > ev[i]) rep[i] -= zeta;  // floor roundoff at bin edges
    }
  }
  const Matrix& v = g.eigenvectors();
  const Matrix binned = v * rep.cast<Complex>().asDiagonal() * v.adjoint();
  // Bins are at least zeta apart; merging them as levels needs a tolerance below that.
  HermitianOperator h_tilde(hermitian_part(binned), 0.5 * zeta);
  HermitianOperator chi(hermitian_part(binned - g.matrix()));
  return {std::move(h_tilde), std::move(chi)};
}

}  // namespace thermoprep
