#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qcorr {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. The workhorse carrier for operators,
/// Kraus blocks and unitaries. Sizes stay small (<= 256) by design, so the
/// implementation favours clarity over blocking tricks.
class ComplexMatrix {
public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  const std::vector<cplx>& entries() const { return a_; }
  std::vector<cplx>& entries() { return a_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;

  cplx trace() const;
  double max_abs() const;
  double frobenius_norm() const;
  bool all_finite() const;

  /// max_ij |(M - M^dag)_ij|; requires square.
  double hermiticity_defect() const;
  /// (M + M^dag) / 2
  ComplexMatrix symmetrized() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) {
    a *= s;
    return a;
  }
  friend ComplexMatrix operator*(const ComplexMatrix& a,
                                 const ComplexMatrix& b);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> a_;
};

/// <a|M|b> for basis-free vectors.
cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b);

/// Kronecker product with most-significant-first index convention:
/// (A (x) B)[(ia,ib),(ja,jb)] = A[ia,ja] B[ib,jb], combined row ia*rowsB+ib.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qcorr
