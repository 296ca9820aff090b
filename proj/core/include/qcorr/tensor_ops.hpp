#pragma once

#include <string>
#include <vector>

#include "qcorr/state.hpp"

namespace qcorr {

/// Reduced state on `keep` (subset of labels, non-empty), kept subsystems in
/// their original order.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<std::string>& keep);

/// rho (x) sigma on the concatenated layout. Labels must be disjoint.
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Conjugation by the unitary representation of the label permutation:
/// the content of subsystem x moves to subsystem perm(x). Labels absent from
/// `perm` stay put. Dimensions must match along every orbit.
DensityMatrix permute_subsystems(
    const DensityMatrix& rho,
    const std::vector<std::pair<std::string, std::string>>& perm);

/// Uniform average over all k! content permutations within each group of
/// equal-dimension subsystems, applied group by group (exact, not sampled).
/// Groups larger than 6 are refused.
DensityMatrix symmetrize_copies(const DensityMatrix& rho,
                                const std::vector<std::vector<std::string>>& groups);

/// Spectral purification: reference dimension equals the rank of rho.
PureState purify(const DensityMatrix& rho, const std::string& ref_label,
                 const ToleranceProfile& tol = ToleranceProfile::standard());

/// A subsystem operator lifted to the full space of `space`, acting on
/// `in_labels` (in that order) and producing `out_subs` in place of them.
/// The output block is inserted at the position of the first in-label;
/// untouched subsystems keep their relative order.
struct LiftedOperator {
  ComplexMatrix full;       // out_layout.total_dim() x space.total_dim()
  SystemLayout out_layout;
};

LiftedOperator lift_operator(const ComplexMatrix& op, const SystemLayout& space,
                             const std::vector<std::string>& in_labels,
                             const SystemLayout& out_subs);

/// Layout that `lift_operator` produces, without building the matrix.
SystemLayout lifted_layout(const SystemLayout& space,
                           const std::vector<std::string>& in_labels,
                           const SystemLayout& out_subs);

}  // namespace qcorr
