#include "thermoprep/hamiltonian_models.hpp"

#include <algorithm>
#include <sstream>

#include "thermoprep/errors.hpp"
#include "thermoprep/random.hpp"

namespace thermoprep {

namespace pauli {
Matrix identity() { return Matrix::Identity(2, 2); }
Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

namespace {

double spectral_width(const Matrix& term) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(term), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return ev[ev.size() - 1] - ev[0];
}

void check_block(const ChainModel& model, std::size_t first, std::size_t last) {
  if (first > last || last >= model.sites) {
    std::ostringstream os;
    os << "block [" << first << ", " << last << "] outside chain of " << model.sites << " sites";
    throw std::out_of_range(os.str());
  }
}

}  // namespace

void ChainModel::validate() const {
  if (sites < 1) throw ValidationError("ChainModel: need at least one site");
  if (local_dim < 2) throw ValidationError("ChainModel: local dimension must be >= 2");
  if (site_terms.size() != sites) throw ValidationError("ChainModel: one site term per site required");
  if (link_terms.size() != sites - 1) throw ValidationError("ChainModel: sites-1 link terms required");
  for (const auto& t : site_terms) {
    if (t.rows() != local_dim || t.cols() != local_dim) throw ValidationError("ChainModel: site term shape");
    HermitianOperator check(t);
  }
  const Index d2 = local_dim * local_dim;
  for (const auto& t : link_terms) {
    if (t.rows() != d2 || t.cols() != d2) throw ValidationError("ChainModel: link term shape");
    HermitianOperator check(t);
  }
}

double ChainModel::link_norm_bound() const {
  double bound = 0.0;
  for (const auto& t : link_terms) bound = std::max(bound, spectral_width(t));
  return bound;
}

Index ChainModel::block_dim(std::size_t first, std::size_t last) const {
  check_block(*this, first, last);
  Index d = 1;
  for (std::size_t s = first; s <= last; ++s) d *= local_dim;
  return d;
}

std::vector<Index> ChainModel::site_dims() const { return std::vector<Index>(sites, local_dim); }

ChainModel transverse_field_ising(std::size_t sites, double J, double g, double hz) {
  ChainModel m;
  m.name = "ising";
  m.sites = sites;
  m.local_dim = 2;
  m.couplings = {{"J", J}, {"g", g}, {"hz", hz}};
  m.site_terms.assign(sites, -g * pauli::x() - hz * pauli::z());
  if (sites > 1) m.link_terms.assign(sites - 1, -J * tensor_product(pauli::z(), pauli::z()));
  m.validate();
  return m;
}

ChainModel heisenberg(std::size_t sites, double J, double hz) {
  ChainModel m;
  m.name = "heisenberg";
  m.sites = sites;
  m.local_dim = 2;
  m.couplings = {{"J", J}, {"hz", hz}};
  m.site_terms.assign(sites, -hz * pauli::z());
  const Matrix link = J * (tensor_product(pauli::x(), pauli::x()) + tensor_product(pauli::y(), pauli::y()) +
                           tensor_product(pauli::z(), pauli::z()));
  if (sites > 1) m.link_terms.assign(sites - 1, link);
  m.validate();
  return m;
}

ChainModel random_nearest_neighbor(std::size_t sites, Index local_dim, std::uint64_t seed, double scale) {
  ChainModel m;
  m.name = "random";
  m.sites = sites;
  m.local_dim = local_dim;
  m.couplings = {{"scale", scale}, {"seed", static_cast<double>(seed)}};
  RandomStream rng(seed);
  for (std::size_t s = 0; s < sites; ++s) m.site_terms.push_back(random_hermitian(local_dim, rng, scale));
  for (std::size_t s = 0; s + 1 < sites; ++s) {
    m.link_terms.push_back(random_hermitian(local_dim * local_dim, rng, scale));
  }
  m.validate();
  return m;
}

HermitianOperator build_block_hamiltonian(const ChainModel& model, std::size_t first, std::size_t last) {
  check_block(model, first, last);
  const std::size_t n = last - first + 1;
  const std::vector<Index> dims(n, model.local_dim);
  const Index dim = model.block_dim(first, last);
  Matrix h = Matrix::Zero(dim, dim);
  for (std::size_t s = 0; s < n; ++s) {
    h += embed_local(model.site_terms[first + s], {s, s}, dims);
  }
  for (std::size_t s = 0; s + 1 < n; ++s) {
    h += embed_local(model.link_terms[first + s], {s, s + 1}, dims);
  }
  return HermitianOperator(std::move(h));
}

HermitianOperator link_term(const ChainModel& model, std::size_t boundary, std::size_t first,
                            std::size_t last) {
  check_block(model, first, last);
  if (boundary < first || boundary + 1 > last) {
    std::ostringstream os;
    os << "link_term: link " << boundary << "-" << boundary + 1 << " not inside block [" << first << ", "
       << last << "]";
    throw std::out_of_range(os.str());
  }
  const std::vector<Index> dims(last - first + 1, model.local_dim);
  const std::size_t local = boundary - first;
  return HermitianOperator(embed_local(model.link_terms[boundary], {local, local + 1}, dims));
}

ShiftedOperator shift_psd(const HermitianOperator& h) {
  const double shift = h.min_eigenvalue();
  Matrix m = h.matrix();
  m.diagonal().array() -= shift;
  return {HermitianOperator(std::move(m), h.degeneracy_tol()), shift};
}

ShiftedOperator shifted_link_term(const ChainModel& model, std::size_t boundary, std::size_t first,
                                  std::size_t last) {
  check_block(model, first, last);
  if (boundary < first || boundary + 1 > last) {
    throw std::out_of_range("shifted_link_term: link not inside block");
  }
  const ShiftedOperator local = shift_psd(HermitianOperator(model.link_terms.at(boundary)));
  const std::vector<Index> dims(last - first + 1, model.local_dim);
  const std::size_t offset = boundary - first;
  return {HermitianOperator(embed_local(local.shifted.matrix(), {offset, offset + 1}, dims)), local.shift};
}

}  // namespace thermoprep
