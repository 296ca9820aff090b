#pragma once

#include <functional>
#include <vector>

#include "qcorr/complex_matrix.hpp"
#include "qcorr/tolerance.hpp"

namespace qcorr {

/// Result of a Hermitian eigendecomposition: M = V diag(lambda) V^dag with
/// eigenvalues ascending and eigenvectors as unitary columns of V.
struct HermitianEig {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;
};

/// Cyclic complex Jacobi diagonalization. The input is symmetrized as
/// (M + M^dag)/2 before iterating; inputs whose hermiticity defect exceeds
/// `hermiticity_tol` are rejected (NotHermitian). Throws NoConvergence if
/// the off-diagonal mass does not vanish within the sweep budget.
HermitianEig hermitian_eig(const ComplexMatrix& m,
                           double hermiticity_tol = 1e-10);

/// Eigenvalues only (ascending); skips eigenvector accumulation.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m,
                                          double hermiticity_tol = 1e-10);

/// Applies f to the spectrum of a Hermitian PSD matrix, restricted to the
/// support: eigenvalues <= support_cutoff map to exactly 0, the rest to
/// f(lambda). f may be complex-valued (used for rotated powers). Throws
/// DomainError if f returns a non-finite value on a retained eigenvalue.
ComplexMatrix matrix_function_on_support(
    const ComplexMatrix& m, const std::function<cplx(double)>& f,
    double support_cutoff, double hermiticity_tol = 1e-10);

/// Support cutoff convention shared by all spectral functions:
/// relative to the largest eigenvalue so rank-deficient pure states stay stable.
double default_support_cutoff(const std::vector<double>& eigenvalues);

/// Schatten 1-norm. Hermitian inputs take the |eigenvalue| route; general
/// square matrices go through the spectrum of M^dag M.
double trace_norm(const ComplexMatrix& m);

/// Orthonormal projector onto the span of eigenvectors with eigenvalue
/// > cutoff (support projector of a PSD matrix).
ComplexMatrix support_projector(const ComplexMatrix& m, double cutoff,
                                double hermiticity_tol = 1e-10);

}  // namespace qcorr
