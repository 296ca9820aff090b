#include "qcorr/state.hpp"

#include <cmath>

#include "qcorr/eig.hpp"
#include "qcorr/errors.hpp"

namespace qcorr {

DensityMatrix DensityMatrix::validated(SystemLayout layout, ComplexMatrix data,
                                       const ToleranceProfile& tol) {
  if (!data.is_square() || data.rows() != layout.total_dim())
    throw LayoutMismatch("matrix is " + std::to_string(data.rows()) + "x" +
                         std::to_string(data.cols()) + " but layout " +
                         layout.to_string() + " has dimension " +
                         std::to_string(layout.total_dim()));
  if (!data.all_finite()) throw InvalidState("non-finite entries");
  if (data.hermiticity_defect() > tol.hermiticity)
    throw InvalidState("hermiticity defect " +
                       std::to_string(data.hermiticity_defect()));
  const double tr = data.trace().real();
  if (std::abs(tr - 1.0) > tol.trace)
    throw InvalidState("trace " + std::to_string(tr) + " != 1");
  for (double l : hermitian_eigenvalues(data, tol.hermiticity)) {
    if (l < -tol.psd)
      throw InvalidState("negative eigenvalue " + std::to_string(l));
  }
  return DensityMatrix(std::move(layout), data.symmetrized());
}

DensityMatrix DensityMatrix::trusted(SystemLayout layout, ComplexMatrix data) {
  if (!data.is_square() || data.rows() != layout.total_dim())
    throw LayoutMismatch("matrix dimension does not match layout " +
                         layout.to_string());
  return DensityMatrix(std::move(layout), std::move(data));
}

DensityMatrix DensityMatrix::reordered(
    const std::vector<std::string>& label_order) const {
  if (label_order.size() != layout_.size())
    throw LayoutMismatch("reorder list has " +
                         std::to_string(label_order.size()) + " labels, layout has " +
                         std::to_string(layout_.size()));
  std::vector<Subsystem> subs;
  std::vector<std::size_t> src_pos;  // src_pos[j] = old position of new slot j
  subs.reserve(label_order.size());
  for (const std::string& label : label_order) {
    const std::size_t p = layout_.position(label);
    src_pos.push_back(p);
    subs.push_back(layout_.subsystems()[p]);
  }
  SystemLayout out_layout(std::move(subs));
  const std::size_t n = layout_.total_dim();
  // sigma[old index] = new index
  std::vector<std::size_t> sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::size_t> d = layout_.digits_of(i);
    std::vector<std::size_t> nd(d.size());
    for (std::size_t j = 0; j < src_pos.size(); ++j) nd[j] = d[src_pos[j]];
    sigma[i] = out_layout.index_of(nd);
  }
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(sigma[i], sigma[j]) = data_(i, j);
  return DensityMatrix(std::move(out_layout), std::move(out));
}

DensityMatrix DensityMatrix::renamed(
    const std::vector<std::pair<std::string, std::string>>& mapping) const {
  std::vector<Subsystem> subs = layout_.subsystems();
  for (Subsystem& s : subs) {
    for (const auto& [from, to] : mapping) {
      if (s.label == from) {
        s.label = to;
        break;
      }
    }
  }
  return DensityMatrix(SystemLayout(std::move(subs)), data_);
}

PureState PureState::validated(SystemLayout layout, std::vector<cplx> amplitudes,
                               const ToleranceProfile& tol) {
  if (amplitudes.size() != layout.total_dim())
    throw LayoutMismatch("amplitude count does not match layout dimension");
  double norm2 = 0.0;
  for (const cplx& a : amplitudes) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw InvalidState("non-finite amplitude");
    norm2 += std::norm(a);
  }
  if (std::abs(std::sqrt(norm2) - 1.0) > 10.0 * tol.trace)
    throw InvalidState("state norm " + std::to_string(std::sqrt(norm2)));
  PureState s;
  s.layout_ = std::move(layout);
  s.amps_ = std::move(amplitudes);
  return s;
}

DensityMatrix PureState::density() const {
  const std::size_t n = amps_.size();
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = amps_[i] * std::conj(amps_[j]);
  return DensityMatrix::trusted(layout_, std::move(m));
}

}  // namespace qcorr
