#include "qcorr/complex_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "qcorr/errors.hpp"

namespace qcorr {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (a_.size() != rows_ * cols_) {
    throw DimensionMismatch("entry count " + std::to_string(a_.size()) +
                            " does not match " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
  }
  if (!all_finite()) {
    throw DomainError("non-finite matrix entry");
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  const std::size_t n = std::min(rows_, cols_);
  for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : a_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : a_) s += std::norm(z);
  return std::sqrt(s);
}

bool ComplexMatrix::all_finite() const {
  for (const cplx& z : a_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double ComplexMatrix::hermiticity_defect() const {
  if (!is_square()) throw DimensionMismatch("hermiticity check on non-square matrix");
  double d = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return d;
}

ComplexMatrix ComplexMatrix::symmetrized() const {
  if (!is_square()) throw DimensionMismatch("symmetrizing non-square matrix");
  ComplexMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw DimensionMismatch("matrix addition shape mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw DimensionMismatch("matrix subtraction shape mismatch");
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (cplx& z : a_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("matrix product shape mismatch: " +
                            std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()));
  ComplexMatrix c(a.rows(), b.cols());
  // i-k-j loop order keeps the inner loop contiguous in both b and c.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("inner product length mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const cplx v = a(ia, ja);
      if (v == cplx(0.0, 0.0)) continue;
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          c(ia * b.rows() + ib, ja * b.cols() + jb) = v * b(ib, jb);
    }
  return c;
}

}  // namespace qcorr
