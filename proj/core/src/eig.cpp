#include "qcorr/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One cyclic Jacobi pass over all strict upper-triangle pairs. Rotations
// that would act below `thresh` are skipped. Returns number of rotations.
std::size_t jacobi_sweep(ComplexMatrix& a, ComplexMatrix* v, double thresh) {
  const std::size_t n = a.rows();
  std::size_t rotations = 0;
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const cplx apq = a(p, q);
      const double abs_apq = std::abs(apq);
      if (abs_apq <= thresh) continue;
      ++rotations;

      const double app = a(p, p).real();
      const double aqq = a(q, q).real();
      // Phase of the pivot and the classic two-sided rotation angle:
      // tan(2 theta) = 2|a_pq| / (a_qq - a_pp), smaller-angle root.
      const cplx phase = apq / abs_apq;
      const double tau = (aqq - app) / (2.0 * abs_apq);
      double t;
      if (tau >= 0.0)
        t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
      else
        t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;
      const cplx spw = s * phase;              // s e^{i phi}
      const cplx spw_conj = std::conj(spw);

      // A <- J^dag A J with J[p,p]=c, J[p,q]=s e^{i phi},
      // J[q,p]=-s e^{-i phi}, J[q,q]=c.
      for (std::size_t k = 0; k < n; ++k) {
        const cplx akp = a(k, p);
        const cplx akq = a(k, q);
        a(k, p) = c * akp - spw_conj * akq;
        a(k, q) = spw * akp + c * akq;
      }
      for (std::size_t k = 0; k < n; ++k) {
        const cplx apk = a(p, k);
        const cplx aqk = a(q, k);
        a(p, k) = c * apk - spw * aqk;
        a(q, k) = spw_conj * apk + c * aqk;
      }
      // Pin exact zeros and real diagonals; rounding otherwise accretes.
      a(p, q) = 0.0;
      a(q, p) = 0.0;
      a(p, p) = cplx(a(p, p).real(), 0.0);
      a(q, q) = cplx(a(q, q).real(), 0.0);

      if (v) {
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = (*v)(k, p);
          const cplx vkq = (*v)(k, q);
          (*v)(k, p) = c * vkp - spw_conj * vkq;
          (*v)(k, q) = spw * vkp + c * vkq;
        }
      }
    }
  }
  return rotations;
}

void jacobi_diagonalize(ComplexMatrix& a, ComplexMatrix* v) {
  const std::size_t n = a.rows();
  if (n <= 1) return;
  const double scale = std::max(1.0, a.frobenius_norm());
  const double target = 1e-13 * scale;
  constexpr std::size_t kMaxSweeps = 64;
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off <= target) return;
    // Threshold sweeps: ignore pivots far below the current off-diagonal
    // mass early on, then tighten.
    const double thresh =
        (sweep < 3) ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    if (jacobi_sweep(a, v, thresh) == 0 && thresh == 0.0) {
      // No rotation possible although off > target: remaining mass is
      // rounding noise relative to the scale.
      if (off <= 1e-11 * scale) return;
      throw NoConvergence("jacobi stalled with off-diagonal norm " +
                          std::to_string(off));
    }
  }
  if (off_diagonal_norm(a) > 1e-11 * scale)
    throw NoConvergence("jacobi did not converge within sweep budget");
}

HermitianEig decompose(const ComplexMatrix& m, double hermiticity_tol,
                       bool want_vectors) {
  if (!m.is_square()) throw DimensionMismatch("eigendecomposition of non-square matrix");
  if (!m.all_finite()) throw DomainError("non-finite entries in eigensolver input");
  if (m.hermiticity_defect() > hermiticity_tol)
    throw NotHermitian("defect " + std::to_string(m.hermiticity_defect()) +
                       " exceeds tolerance " + std::to_string(hermiticity_tol));

  ComplexMatrix a = m.symmetrized();
  const std::size_t n = a.rows();
  ComplexMatrix v;
  if (want_vectors) v = ComplexMatrix::identity(n);
  jacobi_diagonalize(a, want_vectors ? &v : nullptr);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  HermitianEig out;
  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = a(order[i], order[i]).real();
  if (want_vectors) {
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
  }
  return out;
}

}  // namespace

HermitianEig hermitian_eig(const ComplexMatrix& m, double hermiticity_tol) {
  return decompose(m, hermiticity_tol, true);
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m,
                                          double hermiticity_tol) {
  return decompose(m, hermiticity_tol, false).eigenvalues;
}

double default_support_cutoff(const std::vector<double>& eigenvalues) {
  double lambda_max = 0.0;
  for (double l : eigenvalues) lambda_max = std::max(lambda_max, std::abs(l));
  return 1e-10 * lambda_max;
}

ComplexMatrix matrix_function_on_support(const ComplexMatrix& m,
                                         const std::function<cplx(double)>& f,
                                         double support_cutoff,
                                         double hermiticity_tol) {
  const HermitianEig eig = hermitian_eig(m, hermiticity_tol);
  const std::size_t n = m.rows();
  std::vector<cplx> fvals(n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double l = eig.eigenvalues[i];
    if (l <= support_cutoff) continue;  // support convention: maps to 0
    const cplx y = f(l);
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
      throw DomainError("scalar function undefined at eigenvalue " +
                        std::to_string(l));
    fvals[i] = y;
  }
  // V diag(f) V^dag
  ComplexMatrix out(n, n);
  const ComplexMatrix& v = eig.eigenvectors;
  for (std::size_t k = 0; k < n; ++k) {
    if (fvals[k] == cplx(0.0, 0.0)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vik = v(i, k) * fvals[k];
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(v(j, k));
    }
  }
  return out;
}

double trace_norm(const ComplexMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("trace norm of non-square matrix");
  const double scale = std::max(1.0, m.max_abs());
  if (m.hermiticity_defect() <= 1e-12 * scale) {
    double s = 0.0;
    for (double l : hermitian_eigenvalues(m.symmetrized(), 1e-9 * scale))
      s += std::abs(l);
    return s;
  }
  // Singular values via the spectrum of M^dag M.
  const ComplexMatrix gram = m.adjoint() * m;
  double s = 0.0;
  for (double l : hermitian_eigenvalues(gram.symmetrized(), 1e-9 * std::max(1.0, gram.max_abs())))
    s += std::sqrt(std::max(0.0, l));
  return s;
}

ComplexMatrix support_projector(const ComplexMatrix& m, double cutoff,
                                double hermiticity_tol) {
  return matrix_function_on_support(
      m, [](double) { return cplx(1.0, 0.0); }, cutoff, hermiticity_tol);
}

}  // namespace qcorr
