#include <doctest.h>

#include <cmath>

#include "thermoprep/errors.hpp"
#include "thermoprep/gibbs_oracle.hpp"
#include "thermoprep/hamiltonian_models.hpp"

using namespace thermoprep;

TEST_CASE("single site with zero term is the zero operator") {
  ChainModel m = transverse_field_ising(1, 1.0, 0.0, 0.0);
  const HermitianOperator h = build_block_hamiltonian(m, 0, 0);
  CHECK(h.dim() == 2);
  CHECK(h.matrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-qubit transverse-field Ising spectrum") {
  // Eigenvalues of -ZZ - XI - IX from a direct 4x4 diagonalization.
  const double expected[] = {-2.23606797749979, -1.0, 1.0, 2.23606797749979};
  const HermitianOperator h = build_block_hamiltonian(transverse_field_ising(2, 1.0, 1.0), 0, 1);
  for (int i = 0; i < 4; ++i) CHECK(h.eigenvalues()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("whole-chain block equals the sum of all terms") {
  const ChainModel m = random_nearest_neighbor(4, 2, 17);
  const HermitianOperator full = build_block_hamiltonian(m, 0, 3);
  const auto dims = m.site_dims();
  Matrix sum = Matrix::Zero(16, 16);
  for (std::size_t s = 0; s < 4; ++s) sum += embed_local(m.site_terms[s], SiteRange{s, s}, dims);
  for (std::size_t l = 0; l < 3; ++l) sum += embed_local(m.link_terms[l], SiteRange{l, l + 1}, dims);
  CHECK(operator_norm(full.matrix() - sum) < 1e-12);
}

TEST_CASE("sub-blocks contain only their own terms") {
  const ChainModel m = transverse_field_ising(4, 1.0, 0.7, 0.2);
  const HermitianOperator left = build_block_hamiltonian(m, 0, 1);
  const HermitianOperator right = build_block_hamiltonian(m, 2, 3);
  const HermitianOperator link = link_term(m, 1, 0, 3);
  const Matrix id = Matrix::Identity(4, 4);
  const Matrix assembled = tensor_product(left.matrix(), id) + tensor_product(id, right.matrix()) + link.matrix();
  CHECK(operator_norm(assembled - build_block_hamiltonian(m, 0, 3).matrix()) < 1e-12);
}

TEST_CASE("link terms") {
  SUBCASE("Ising ZZ between two-site blocks has norm 1") {
    const ChainModel m = transverse_field_ising(4, 1.0, 1.0);
    const HermitianOperator link = link_term(m, 1, 0, 3);
    CHECK(link.dim() == 16);
    CHECK(link.operator_norm() == doctest::Approx(1.0));
  }
  SUBCASE("zero link gives the zero operator") {
    const ChainModel m = transverse_field_ising(2, 0.0, 1.0);
    CHECK(link_term(m, 0, 0, 1).matrix().cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.link_norm_bound() == 0.0);
  }
  SUBCASE("boundary outside the block") {
    const ChainModel m = transverse_field_ising(4, 1.0, 1.0);
    CHECK_THROWS(link_term(m, 3, 0, 3));
  }
}

TEST_CASE("shift_psd") {
  SUBCASE("Z becomes diag(2, 0) with shift -1") {
    const ShiftedOperator s = shift_psd(HermitianOperator(pauli::z()));
    CHECK(s.shift == doctest::Approx(-1.0));
    CHECK(s.shifted.matrix()(0, 0).real() == doctest::Approx(2.0));
    CHECK(std::abs(s.shifted.matrix()(1, 1)) < 1e-15);
  }
  SUBCASE("already PSD operators are untouched") {
    const std::vector<double> d = {0.0, 0.5, 3.0};
    const ShiftedOperator s = shift_psd(HermitianOperator::diagonal(d));
    CHECK(s.shift == 0.0);
    CHECK(operator_norm(s.shifted.matrix() - HermitianOperator::diagonal(d).matrix()) == 0.0);
  }
  SUBCASE("random link terms end at minimum eigenvalue 0") {
    const ChainModel m = random_nearest_neighbor(4, 2, 99);
    for (std::size_t b = 0; b < 3; ++b) {
      const ShiftedOperator s = shifted_link_term(m, b, 0, 3);
      CHECK(std::abs(s.shifted.min_eigenvalue()) < 1e-10);
      CHECK(s.shifted.max_eigenvalue() <= m.link_norm_bound() + 1e-12);
    }
  }
}

TEST_CASE("shifting the Hamiltonian leaves the Gibbs state unchanged") {
  const HermitianOperator h = build_block_hamiltonian(random_nearest_neighbor(3, 2, 5), 0, 2);
  const HermitianOperator shifted(h.matrix() + 3.7 * Matrix::Identity(8, 8));
  CHECK(trace_distance(gibbs_state(h, 1.3), gibbs_state(shifted, 1.3)) < 1e-10);
}

TEST_CASE("link_norm_bound bounds every shifted link") {
  const ChainModel m = heisenberg(4, 0.8, 0.3);
  for (std::size_t b = 0; b < 3; ++b) {
    CHECK(shifted_link_term(m, b, 0, 3).shifted.operator_norm() <= m.link_norm_bound() + 1e-12);
  }
  CHECK(m.link_norm_bound() == doctest::Approx(0.8 * 4.0));
}

TEST_CASE("model validation") {
  ChainModel m = transverse_field_ising(2, 1.0, 1.0);
  m.link_terms.clear();
  CHECK_THROWS_AS(m.validate(), ValidationError);
  ChainModel bad = transverse_field_ising(2, 1.0, 1.0);
  bad.site_terms[0](0, 1) = Complex(5.0, 0.0);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}
