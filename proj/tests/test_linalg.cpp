#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qcorr/eig.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/rng.hpp"
#include "qcorr/states_library.hpp"

using namespace qcorr;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

double reconstruction_error(const ComplexMatrix& m, const HermitianEig& eig) {
  const std::size_t n = m.rows();
  ComplexMatrix rec(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        rec(i, j) += eig.eigenvectors(i, k) * eig.eigenvalues[k] *
                     std::conj(eig.eigenvectors(j, k));
  return (rec - m.symmetrized()).max_abs();
}

double unitarity_defect(const ComplexMatrix& v) {
  return (v.adjoint() * v - ComplexMatrix::identity(v.rows())).max_abs();
}

}  // namespace

TEST_CASE("identity eigendecomposition") {
  const HermitianEig eig = hermitian_eig(ComplexMatrix::identity(2));
  CHECK(eig.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(eig.eigenvalues[1] == doctest::Approx(1.0));
  CHECK(unitarity_defect(eig.eigenvectors) < 1e-12);
}

TEST_CASE("diagonal matrix keeps its eigenvalues, ascending") {
  const HermitianEig eig = hermitian_eig(diag2(0.8, 0.2));
  CHECK(eig.eigenvalues[0] == doctest::Approx(0.2));
  CHECK(eig.eigenvalues[1] == doctest::Approx(0.8));
}

TEST_CASE("Pauli-X eigenvalues are -1 and 1") {
  // Characteristic polynomial by hand: lambda^2 - 1 = 0.
  ComplexMatrix x(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  const HermitianEig eig = hermitian_eig(x);
  CHECK(eig.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reconstruction_error(x, eig) < 1e-10);
}

TEST_CASE("random Hermitian matrices reconstruct and diagonalize") {
  CounterRng rng(11);
  for (std::size_t dim : {3, 8, 16, 33}) {
    const ComplexMatrix m = random_hermitian(dim, rng);
    const HermitianEig eig = hermitian_eig(m, 1e-8);
    CHECK(reconstruction_error(m, eig) <= 1e-10 * std::max(1.0, m.max_abs()));
    CHECK(unitarity_defect(eig.eigenvectors) <= 1e-10);
    for (std::size_t i = 1; i < dim; ++i)
      CHECK(eig.eigenvalues[i - 1] <= eig.eigenvalues[i]);
  }
}

TEST_CASE("non-Hermitian input is rejected") {
  ComplexMatrix m(2, 2);
  m(0, 1) = 1.0;          // m(1,0) stays 0
  CHECK_THROWS_AS(hermitian_eig(m, 1e-10), NotHermitian);
}

TEST_CASE("non-finite entries are rejected at construction") {
  std::vector<cplx> entries(4, cplx(0.0, 0.0));
  entries[0] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(ComplexMatrix(2, 2, entries), DomainError);
}

TEST_CASE("matrix function on support: sqrt, log, inverse sqrt") {
  const ComplexMatrix m = diag2(4.0, 0.0);
  const ComplexMatrix root = matrix_function_on_support(
      m, [](double l) { return cplx(std::sqrt(l), 0.0); }, 1e-12);
  CHECK(root(0, 0).real() == doctest::Approx(2.0));
  CHECK(std::abs(root(1, 1)) < 1e-12);

  const ComplexMatrix half = diag2(0.5, 0.5);
  const ComplexMatrix lg = matrix_function_on_support(
      half, [](double l) { return cplx(std::log(l), 0.0); }, 1e-12);
  CHECK(lg(0, 0).real() == doctest::Approx(-0.6931471805599453));
  CHECK(lg(1, 1).real() == doctest::Approx(-0.6931471805599453));

  const ComplexMatrix pinv_root = matrix_function_on_support(
      m, [](double l) { return cplx(1.0 / std::sqrt(l), 0.0); }, 1e-12);
  CHECK(pinv_root(0, 0).real() == doctest::Approx(0.5));
  CHECK(std::abs(pinv_root(1, 1)) < 1e-12);
}

TEST_CASE("identity function reproduces the symmetrized input") {
  CounterRng rng(5);
  ComplexMatrix m = random_hermitian(6, rng);
  m = m * m.adjoint();  // PSD
  const ComplexMatrix out = matrix_function_on_support(
      m, [](double l) { return cplx(l, 0.0); },
      default_support_cutoff(hermitian_eigenvalues(m, 1e-8)), 1e-8);
  CHECK((out - m.symmetrized()).max_abs() <= 1e-10 * std::max(1.0, m.max_abs()));
}

TEST_CASE("matrix function domain errors surface") {
  CHECK_THROWS_AS(matrix_function_on_support(
                      diag2(1.0, 2.0), [](double) { return cplx(std::nan(""), 0.0); },
                      1e-12),
                  DomainError);
}

TEST_CASE("trace norm on simple instances") {
  CHECK(trace_norm(ComplexMatrix(2, 2)) == doctest::Approx(0.0));
  CHECK(trace_norm(diag2(0.3, -0.1)) == doctest::Approx(0.4));

  // Difference of two orthogonal pure-state projectors.
  CHECK(trace_norm(diag2(1.0, -1.0)) == doctest::Approx(2.0));
}

TEST_CASE("trace norm is unitarily invariant") {
  CounterRng rng(21);
  for (int rep = 0; rep < 4; ++rep) {
    const ComplexMatrix m = random_ginibre(8, 8, rng);
    const ComplexMatrix u = random_unitary(8, rng);
    const ComplexMatrix v = random_unitary(8, rng);
    CHECK(std::abs(trace_norm(m) - trace_norm(u * m * v)) < 1e-9);
  }
}

TEST_CASE("support projector spans exactly the support") {
  const ComplexMatrix p = support_projector(diag2(0.7, 0.0), 1e-12);
  CHECK(p(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(p(1, 1)) < 1e-12);
}
