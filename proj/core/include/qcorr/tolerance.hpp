#pragma once

namespace qcorr {

/// Numerical tolerances threaded through every validation and measure.
/// One instance comes from the CLI and is passed down unchanged.
struct ToleranceProfile {
  double hermiticity = 1e-10;
  double psd = 1e-10;
  double trace = 1e-10;
  double entropy_log_cutoff = 1e-12;  // eigenvalues below this contribute 0 to entropies
  double inequality_slack = 1e-9;

  static const ToleranceProfile& standard() {
    static const ToleranceProfile p{};
    return p;
  }
};

}  // namespace qcorr
