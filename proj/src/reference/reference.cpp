#include "thermoprep/reference/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "thermoprep/errors.hpp"

namespace thermoprep::reference {

namespace {

constexpr int kTaylorDegree = 30;
constexpr int kGaussPoints = 20;

double one_norm(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Composite Gauss-Legendre on [lo, hi] of a matrix-valued integrand.
template <class F>
Matrix gauss_legendre(F&& f, double lo, double hi, std::size_t panels, Index dim) {
  using rule = boost::math::quadrature::gauss<double, kGaussPoints>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  Matrix sum = Matrix::Zero(dim, dim);
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < x.size(); ++i) {
      // Stored abscissae are the non-negative half; zero appears once for odd rules.
      if (x[i] == 0.0) {
        sum += w[i] * half * f(mid);
      } else {
        sum += w[i] * half * (f(mid - half * x[i]) + f(mid + half * x[i]));
      }
    }
  }
  return sum;
}

}  // namespace

Matrix taylor_expm(const Matrix& a) {
  if (!a.allFinite()) throw NumericalError("taylor_expm: non-finite input");
  const double norm = one_norm(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  for (int k = 1; k <= kTaylorDegree; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Matrix gibbs_matrix(const Matrix& h, double beta) {
  const double shift = h.diagonal().real().minCoeff();
  const Matrix shifted = h - shift * Matrix::Identity(h.rows(), h.cols());
  Matrix e = taylor_expm(-beta * shifted);
  return e / e.trace().real();
}

Matrix dyson_imaginary_quadrature(const Matrix& hamiltonian, const Matrix& h, double beta, std::size_t panels) {
  const Index dim = hamiltonian.rows();
  const double shift = hamiltonian.diagonal().real().minCoeff();
  const Matrix hs = hamiltonian - shift * Matrix::Identity(dim, dim);
  // exp(-(beta-b)H) h exp(-bH) / Z is invariant under H -> H - shift.
  const double z = taylor_expm(-beta * hs).trace().real();
  auto integrand = [&](double b) -> Matrix {
    return taylor_expm(-(beta - b) * hs) * h * taylor_expm(-b * hs);
  };
  return -gauss_legendre(integrand, 0.0, beta, panels, dim) / z;
}

Matrix dyson_real_time_quadrature(const Matrix& hamiltonian, const Matrix& h, double t, std::size_t panels) {
  const Index dim = hamiltonian.rows();
  const Complex minus_i(0.0, -1.0);
  auto integrand = [&](double s) -> Matrix {
    return taylor_expm(minus_i * (t - s) * hamiltonian) * h * taylor_expm(minus_i * s * hamiltonian);
  };
  return gauss_legendre(integrand, 0.0, t, panels, dim);
}

Matrix dephase_gaussian_quadrature(const Matrix& rho, const Matrix& g, double sigma, std::size_t nodes,
                                   double truncation) {
  if (!(sigma > 0.0) || nodes < 2 || !(truncation > 0.0)) {
    throw ParameterError("dephase_gaussian_quadrature: invalid quadrature");
  }
  const double t_max = truncation * sigma;
  const double dt = 2.0 * t_max / static_cast<double>(nodes - 1);
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  Matrix sum = Matrix::Zero(rho.rows(), rho.cols());
  double weight_sum = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = -t_max + dt * static_cast<double>(k);
    const double end = (k == 0 || k + 1 == nodes) ? 0.5 : 1.0;
    const double w = end * dt * norm * std::exp(-0.5 * (t / sigma) * (t / sigma));
    const Matrix u = taylor_expm(Complex(0.0, -t) * g);
    sum += w * (u * rho * u.adjoint());
    weight_sum += w;
  }
  // Renormalize the truncated Gaussian so the map stays trace preserving.
  return sum / weight_sum;
}

double trace_norm_hermitian(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

SuccessRunEstimate success_run_monte_carlo(std::span<const double> step_success, std::size_t trials,
                                           RandomStream& rng) {
  if (step_success.empty() || trials < 2) throw ParameterError("success_run_monte_carlo: need steps and >= 2 trials");
  double sum_m = 0.0, sum_m2 = 0.0, sum_a = 0.0, sum_a2 = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    double m = 0.0, alpha = 0.0;
    std::size_t position = 0;
    while (position < step_success.size()) {
      m += 1.0;
      if (rng.uniform() < step_success[position]) {
        ++position;
      } else {
        alpha += 1.0;
        position = 0;
      }
    }
    sum_m += m;
    sum_m2 += m * m;
    sum_a += alpha;
    sum_a2 += alpha * alpha;
  }
  const auto n = static_cast<double>(trials);
  const auto stderr_of = [n](double s, double s2) {
    const double mean = s / n;
    const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
    return std::sqrt(var / n);
  };
  return {sum_m / n, stderr_of(sum_m, sum_m2), sum_a / n, stderr_of(sum_a, sum_a2)};
}

SuccessRunValues success_run_closed_form(double p, std::size_t n_steps) {
  if (!(p > 0.0) || p > 1.0 || n_steps == 0) throw ParameterError("success_run_closed_form: need p in (0,1], n >= 1");
  const double n = static_cast<double>(n_steps);
  if (p == 1.0) return {n, 0.0};
  const double pn = std::pow(p, n);
  const double m = (1.0 - pn) / (pn * (1.0 - p));
  return {m, (1.0 - p) * m};
}

double step_time_reference(double eps, double beta, double h_norm) {
  const double x = eps * beta * h_norm;
  if (x == 0.0) return 0.0;
  const double log_term = -std::log(x);
  const double dephasing = log_term / (eps * eps * beta * h_norm * h_norm);
  const double conjugation = log_term * eps / (eps * eps * beta * h_norm * h_norm);
  return dephasing + conjugation;
}

}  // namespace thermoprep::reference
