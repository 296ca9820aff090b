#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcorr/state.hpp"
#include "qcorr/tensor_ops.hpp"

namespace qcorr {

/// CPTP map in Kraus form. Kraus blocks are out_dim x in_dim on the
/// declared sub-layouts; identity padding on the rest of a state happens at
/// application time.
class Channel {
public:
  Channel() = default;
  Channel(SystemLayout in_layout, SystemLayout out_layout,
          std::vector<ComplexMatrix> kraus, double tp_tol = 1e-9);

  const SystemLayout& in_layout() const { return in_; }
  const SystemLayout& out_layout() const { return out_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

  /// max-abs deviation of sum K^dag K from the identity.
  double trace_preservation_defect() const;

  static Channel identity(const SystemLayout& layout);
  /// Completely depolarizing: every input goes to the maximally mixed state.
  static Channel depolarizing(const SystemLayout& layout);

private:
  SystemLayout in_, out_;
  std::vector<ComplexMatrix> kraus_;
};

/// ch applied to the subsystems of rho named by ch.in_layout (identity on
/// the others). The output subsystems take the place of the first input
/// label; untouched subsystems keep their order.
DensityMatrix apply_channel(const Channel& ch, const DensityMatrix& rho);

/// after o before; before.out_layout must equal after.in_layout.
Channel compose(const Channel& after, const Channel& before);

/// POVM on one subsystem: PSD effects summing to the identity.
class Povm {
public:
  Povm(std::string system, std::size_t dim, std::vector<ComplexMatrix> effects,
       const ToleranceProfile& tol = ToleranceProfile::standard());

  const std::string& system() const { return system_; }
  std::size_t dim() const { return dim_; }
  const std::vector<ComplexMatrix>& effects() const { return effects_; }
  std::size_t outcomes() const { return effects_.size(); }

  /// Projective measurement in the basis given by the columns of u.
  static Povm projective(const std::string& system, const ComplexMatrix& u);

private:
  std::string system_;
  std::size_t dim_;
  std::vector<ComplexMatrix> effects_;
};

/// Born-rule dephasing to a classical register: sigma -> sum_x Tr{L^x sigma}
/// |x><x|. The output register keeps the measured label by default so that
/// partitions remain valid across measurement.
Channel measurement_channel(const Povm& povm, const std::string& x_label = "");

/// Isometric extension U of a measurement map: A -> X (x) E with
/// Tr_E(U rho U^dag) equal to the measurement output. dim(E) equals the
/// total rank of the effects (one Kraus per spectral component).
struct IsometricExtension {
  ComplexMatrix isometry;  // (dim X * dim E) x dim A
  std::string a_label;
  std::string x_label;
  std::string e_label;
  std::size_t x_dim = 0;
  std::size_t e_dim = 0;

  /// The extension as a channel A -> X (x) E.
  Channel as_channel() const;
};

IsometricExtension isometric_extension(const Povm& povm,
                                       const std::string& x_label = "",
                                       const std::string& e_label = "");

/// The reversal of an isometric extension: U^dag (.) U on the range of U,
/// and fill_state times the leftover trace off the range. Inverts the
/// extension channel exactly. An empty fill defaults to maximally mixed.
Channel reversal_map(const IsometricExtension& ext,
                     const std::optional<DensityMatrix>& fill_state = {});

/// Rotated Petz recovery map from c_labels to all of rho_ac's systems,
///   rho_ac^{(1+it)/2} rho_c^{-(1+it)/2} (.) rho_c^{-(1-it)/2} rho_ac^{(1-it)/2},
/// completed off the support of rho_c by preparing rho_ac. t = 0 is the
/// plain Petz map.
Channel petz_recovery(const DensityMatrix& rho_ac,
                      const std::vector<std::string>& c_labels, double t,
                      const ToleranceProfile& tol = ToleranceProfile::standard());

/// Measure-then-prepare (entanglement-breaking) channel: one prepared state
/// per POVM outcome, all on the measured system's labels.
Channel eb_channel(const Povm& povm, const std::vector<DensityMatrix>& preps);

/// Channel from a Stinespring isometry v: in -> out (x) env, tracing env.
Channel channel_from_isometry(const ComplexMatrix& v, SystemLayout in_layout,
                              SystemLayout out_layout, std::size_t env_dim);

}  // namespace qcorr
