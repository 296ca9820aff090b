#pragma once

#include "qcorr/complex_matrix.hpp"
#include "qcorr/layout.hpp"
#include "qcorr/tolerance.hpp"

namespace qcorr {

/// Density operator bound to a SystemLayout. `validated` enforces the full
/// contract (Hermitian, PSD spectrum, unit trace); `trusted` is for outputs
/// of operations that preserve those properties algebraically and only
/// re-checks what is cheap.
class DensityMatrix {
public:
  DensityMatrix() = default;

  static DensityMatrix validated(
      SystemLayout layout, ComplexMatrix data,
      const ToleranceProfile& tol = ToleranceProfile::standard());
  static DensityMatrix trusted(SystemLayout layout, ComplexMatrix data);

  const SystemLayout& layout() const { return layout_; }
  const ComplexMatrix& matrix() const { return data_; }
  std::size_t dim() const { return layout_.total_dim(); }

  /// Same state with subsystems listed in the given label order.
  DensityMatrix reordered(const std::vector<std::string>& label_order) const;
  /// Same state with labels renamed according to `mapping` (identity for
  /// labels not present in the map).
  DensityMatrix renamed(
      const std::vector<std::pair<std::string, std::string>>& mapping) const;

private:
  DensityMatrix(SystemLayout layout, ComplexMatrix data)
      : layout_(std::move(layout)), data_(std::move(data)) {}

  SystemLayout layout_;
  ComplexMatrix data_;
};

class PureState {
public:
  PureState() = default;

  static PureState validated(
      SystemLayout layout, std::vector<cplx> amplitudes,
      const ToleranceProfile& tol = ToleranceProfile::standard());

  const SystemLayout& layout() const { return layout_; }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  std::size_t dim() const { return layout_.total_dim(); }

  DensityMatrix density() const;

private:
  SystemLayout layout_;
  std::vector<cplx> amps_;
};

}  // namespace qcorr
