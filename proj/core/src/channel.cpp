#include "qcorr/channel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qcorr/eig.hpp"
#include "qcorr/errors.hpp"

namespace qcorr {

namespace {

constexpr double kEffectDropNorm = 1e-12;

// Eigendecompose once, apply a spectral function with the relative support
// cutoff convention.
ComplexMatrix spectral_apply(const HermitianEig& eig,
                             const std::function<cplx(double)>& f) {
  const double cutoff = default_support_cutoff(eig.eigenvalues);
  const std::size_t n = eig.eigenvalues.size();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double l = eig.eigenvalues[k];
    if (l <= cutoff) continue;
    const cplx y = f(l);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vik = eig.eigenvectors(i, k) * y;
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += vik * std::conj(eig.eigenvectors(j, k));
    }
  }
  return out;
}

// sqrt(lambda) * exp(i * s * t * ln(lambda) / 2) with sign s; the building
// block of the rotated Petz family.
std::function<cplx(double)> rotated_power(double exponent_half, double t, double sign) {
  return [exponent_half, t, sign](double l) {
    const double ln_l = std::log(l);
    const double mag = std::exp(exponent_half * ln_l);
    const double phase = sign * 0.5 * t * ln_l;
    return cplx(mag * std::cos(phase), mag * std::sin(phase));
  };
}

// Spectral square-root vectors of a PSD operator: columns phi_k with
// sum_k phi_k phi_k^dag = m (components below the drop threshold skipped).
std::vector<std::vector<cplx>> sqrt_factors(const ComplexMatrix& m,
                                            double hermiticity_tol) {
  const HermitianEig eig = hermitian_eig(m, hermiticity_tol);
  std::vector<std::vector<cplx>> out;
  for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
    const double l = eig.eigenvalues[k];
    if (l <= kEffectDropNorm) continue;
    std::vector<cplx> v(m.rows());
    const double w = std::sqrt(l);
    for (std::size_t i = 0; i < m.rows(); ++i) v[i] = w * eig.eigenvectors(i, k);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

Channel::Channel(SystemLayout in_layout, SystemLayout out_layout,
                 std::vector<ComplexMatrix> kraus, double tp_tol)
    : in_(std::move(in_layout)), out_(std::move(out_layout)), kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw InvalidPovm("channel without Kraus operators");
  for (const ComplexMatrix& k : kraus_) {
    if (k.rows() != out_.total_dim() || k.cols() != in_.total_dim())
      throw LayoutMismatch("Kraus block is " + std::to_string(k.rows()) + "x" +
                           std::to_string(k.cols()) + ", expected " +
                           std::to_string(out_.total_dim()) + "x" +
                           std::to_string(in_.total_dim()));
  }
  const double defect = trace_preservation_defect();
  if (defect > tp_tol)
    throw LayoutMismatch("Kraus operators are not trace preserving (defect " +
                         std::to_string(defect) + ")");
}

double Channel::trace_preservation_defect() const {
  ComplexMatrix s(in_.total_dim(), in_.total_dim());
  for (const ComplexMatrix& k : kraus_) s += k.adjoint() * k;
  s -= ComplexMatrix::identity(in_.total_dim());
  return s.max_abs();
}

Channel Channel::identity(const SystemLayout& layout) {
  return Channel(layout, layout, {ComplexMatrix::identity(layout.total_dim())});
}

Channel Channel::depolarizing(const SystemLayout& layout) {
  const std::size_t d = layout.total_dim();
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(d * d);
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      ComplexMatrix k(d, d);
      k(i, j) = w;
      kraus.push_back(std::move(k));
    }
  return Channel(layout, layout, std::move(kraus));
}

DensityMatrix apply_channel(const Channel& ch, const DensityMatrix& rho) {
  for (const Subsystem& s : ch.in_layout().subsystems()) {
    if (!rho.layout().has_label(s.label))
      throw LayoutMismatch("state lacks channel input '" + s.label + "'");
    if (rho.layout().dim_of(s.label) != s.dim)
      throw LayoutMismatch("dimension mismatch on '" + s.label + "'");
  }
  const std::vector<std::string> in_labels = ch.in_layout().labels();
  SystemLayout out_layout =
      lifted_layout(rho.layout(), in_labels, ch.out_layout());

  ComplexMatrix acc(out_layout.total_dim(), out_layout.total_dim());
  for (const ComplexMatrix& k : ch.kraus()) {
    LiftedOperator lifted = lift_operator(k, rho.layout(), in_labels, ch.out_layout());
    acc += lifted.full * rho.matrix() * lifted.full.adjoint();
  }
  return DensityMatrix::trusted(std::move(out_layout), acc.symmetrized());
}

Channel compose(const Channel& after, const Channel& before) {
  if (!(before.out_layout() == after.in_layout()))
    throw LayoutMismatch("compose: inner layouts differ, " +
                         before.out_layout().to_string() + " vs " +
                         after.in_layout().to_string());
  std::vector<ComplexMatrix> kraus;
  for (const ComplexMatrix& a : after.kraus())
    for (const ComplexMatrix& b : before.kraus()) {
      ComplexMatrix k = a * b;
      if (k.max_abs() > 1e-14) kraus.push_back(std::move(k));
    }
  return Channel(before.in_layout(), after.out_layout(), std::move(kraus));
}

Povm::Povm(std::string system, std::size_t dim, std::vector<ComplexMatrix> effects,
           const ToleranceProfile& tol)
    : system_(std::move(system)), dim_(dim), effects_(std::move(effects)) {
  if (effects_.empty()) throw InvalidPovm("no effects");
  ComplexMatrix sum(dim_, dim_);
  for (const ComplexMatrix& e : effects_) {
    if (!e.is_square() || e.rows() != dim_)
      throw InvalidPovm("effect dimension mismatch");
    if (e.hermiticity_defect() > tol.hermiticity)
      throw InvalidPovm("effect not Hermitian");
    for (double l : hermitian_eigenvalues(e, tol.hermiticity))
      if (l < -tol.psd) throw InvalidPovm("effect has eigenvalue " + std::to_string(l));
    sum += e;
  }
  sum -= ComplexMatrix::identity(dim_);
  if (sum.max_abs() > 1e-9)
    throw InvalidPovm("effects sum to identity with defect " +
                      std::to_string(sum.max_abs()));
}

Povm Povm::projective(const std::string& system, const ComplexMatrix& u) {
  if (!u.is_square()) throw InvalidPovm("basis matrix must be square");
  const std::size_t d = u.rows();
  std::vector<ComplexMatrix> effects;
  for (std::size_t x = 0; x < d; ++x) {
    ComplexMatrix e(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) e(i, j) = u(i, x) * std::conj(u(j, x));
    effects.push_back(std::move(e));
  }
  return Povm(system, d, std::move(effects));
}

Channel measurement_channel(const Povm& povm, const std::string& x_label) {
  const std::string out_label = x_label.empty() ? povm.system() : x_label;
  const std::size_t n_out = povm.outcomes();
  std::vector<ComplexMatrix> kraus;
  for (std::size_t x = 0; x < n_out; ++x) {
    for (const std::vector<cplx>& phi :
         sqrt_factors(povm.effects()[x], 1e-9)) {
      ComplexMatrix k(n_out, povm.dim());
      for (std::size_t j = 0; j < povm.dim(); ++j) k(x, j) = std::conj(phi[j]);
      kraus.push_back(std::move(k));
    }
  }
  if (kraus.empty()) throw InvalidPovm("all effects below the drop threshold");
  return Channel(SystemLayout::single(povm.system(), povm.dim()),
                 SystemLayout::single(out_label, n_out), std::move(kraus));
}

IsometricExtension isometric_extension(const Povm& povm,
                                       const std::string& x_label,
                                       const std::string& e_label) {
  std::vector<std::vector<std::vector<cplx>>> factors;
  std::size_t e_dim = 0;
  for (const ComplexMatrix& effect : povm.effects()) {
    factors.push_back(sqrt_factors(effect, 1e-9));
    e_dim += factors.back().size();
  }
  if (e_dim == 0) throw InvalidPovm("all effects below the drop threshold");

  const std::size_t x_dim = povm.outcomes();
  ComplexMatrix u(x_dim * e_dim, povm.dim());
  std::size_t e = 0;
  for (std::size_t x = 0; x < x_dim; ++x) {
    for (const std::vector<cplx>& phi : factors[x]) {
      const std::size_t row = x * e_dim + e;
      for (std::size_t j = 0; j < povm.dim(); ++j) u(row, j) = std::conj(phi[j]);
      ++e;
    }
  }

  IsometricExtension ext;
  ext.isometry = std::move(u);
  ext.a_label = povm.system();
  ext.x_label = x_label.empty() ? povm.system() : x_label;
  ext.e_label = e_label.empty() ? povm.system() + "#E" : e_label;
  ext.x_dim = x_dim;
  ext.e_dim = e_dim;
  return ext;
}

Channel IsometricExtension::as_channel() const {
  const std::size_t a_dim = isometry.cols();
  return Channel(SystemLayout::single(a_label, a_dim),
                 SystemLayout({{x_label, x_dim}, {e_label, e_dim}}),
                 {isometry});
}

Channel reversal_map(const IsometricExtension& ext,
                     const std::optional<DensityMatrix>& fill_state) {
  const std::size_t a_dim = ext.isometry.cols();
  const std::size_t xe_dim = ext.isometry.rows();

  ComplexMatrix fill(a_dim, a_dim);
  if (fill_state) {
    if (fill_state->dim() != a_dim)
      throw LayoutMismatch("fill state dimension " +
                           std::to_string(fill_state->dim()) + " != " +
                           std::to_string(a_dim));
    fill = fill_state->matrix();
  } else {
    for (std::size_t i = 0; i < a_dim; ++i)
      fill(i, i) = 1.0 / static_cast<double>(a_dim);
  }

  std::vector<ComplexMatrix> kraus;
  kraus.push_back(ext.isometry.adjoint());

  // Off-range fill: Kraus sqrt(mu_j) |v_j><b_m| over the fill spectrum and
  // an orthonormal basis of ker(U^dag).
  ComplexMatrix proj = ComplexMatrix::identity(xe_dim) - ext.isometry * ext.isometry.adjoint();
  const HermitianEig peig = hermitian_eig(proj.symmetrized(), 1e-8);
  std::vector<std::vector<cplx>> kernel_basis;
  for (std::size_t k = 0; k < peig.eigenvalues.size(); ++k) {
    if (peig.eigenvalues[k] > 0.5) {
      std::vector<cplx> b(xe_dim);
      for (std::size_t i = 0; i < xe_dim; ++i) b[i] = peig.eigenvectors(i, k);
      kernel_basis.push_back(std::move(b));
    }
  }
  for (const std::vector<cplx>& w : sqrt_factors(fill, 1e-9)) {
    for (const std::vector<cplx>& b : kernel_basis) {
      ComplexMatrix k(a_dim, xe_dim);
      for (std::size_t i = 0; i < a_dim; ++i)
        for (std::size_t j = 0; j < xe_dim; ++j) k(i, j) = w[i] * std::conj(b[j]);
      kraus.push_back(std::move(k));
    }
  }
  return Channel(SystemLayout({{ext.x_label, ext.x_dim}, {ext.e_label, ext.e_dim}}),
                 SystemLayout::single(ext.a_label, a_dim), std::move(kraus));
}

Channel petz_recovery(const DensityMatrix& rho_ac,
                      const std::vector<std::string>& c_labels, double t,
                      const ToleranceProfile& tol) {
  if (!std::isfinite(t)) throw DomainError("rotation parameter must be finite");
  std::set<std::string> c_set(c_labels.begin(), c_labels.end());
  if (c_set.size() != c_labels.size()) throw LabelCollision("duplicate c label");
  for (const std::string& l : c_labels) rho_ac.layout().position(l);
  if (c_set.size() >= rho_ac.layout().size())
    throw LayoutMismatch("nothing to recover: c covers the whole layout");

  const DensityMatrix rho_c = partial_trace(rho_ac, c_labels);
  const HermitianEig eig_ac = hermitian_eig(rho_ac.matrix(), tol.hermiticity);
  const HermitianEig eig_c = hermitian_eig(rho_c.matrix(), tol.hermiticity);

  const ComplexMatrix m_plus = spectral_apply(eig_ac, rotated_power(0.5, t, +1.0));
  const ComplexMatrix c_minus = spectral_apply(eig_c, rotated_power(-0.5, t, -1.0));
  if (!m_plus.all_finite() || !c_minus.all_finite())
    throw SingularMarginal("non-finite rotated power of a marginal");

  // Positions of the C digits and the complementary A digits inside rho_ac.
  std::vector<std::size_t> c_pos, a_pos;
  std::vector<Subsystem> c_subs;
  for (std::size_t p = 0; p < rho_ac.layout().size(); ++p) {
    const Subsystem& s = rho_ac.layout().subsystems()[p];
    if (c_set.count(s.label)) {
      c_pos.push_back(p);
      c_subs.push_back(s);
    } else {
      a_pos.push_back(p);
    }
  }
  SystemLayout c_layout{c_subs};
  const std::size_t c_dim = c_layout.total_dim();
  const std::size_t ac_dim = rho_ac.dim();
  const std::size_t a_dim = ac_dim / c_dim;

  // Offset tables mapping (a digits, c digits) -> composite index.
  const auto offsets_for = [&](const std::vector<std::size_t>& pos,
                               std::size_t block_dim) {
    std::vector<std::size_t> off(block_dim, 0);
    for (std::size_t m = 0; m < block_dim; ++m) {
      std::size_t rest = m;
      for (std::size_t i = pos.size(); i-- > 0;) {
        const std::size_t p = pos[i];
        const std::size_t d = rho_ac.layout().subsystems()[p].dim;
        off[m] += (rest % d) * rho_ac.layout().strides()[p];
        rest /= d;
      }
    }
    return off;
  };
  const std::vector<std::size_t> a_off = offsets_for(a_pos, a_dim);
  const std::vector<std::size_t> c_off = offsets_for(c_pos, c_dim);

  // K_a = m_plus . (|a>_A (x) c_minus), assembled through column slicing.
  std::vector<ComplexMatrix> kraus;
  for (std::size_t ai = 0; ai < a_dim; ++ai) {
    ComplexMatrix slice(ac_dim, c_dim);  // columns of m_plus at (ai, c)
    for (std::size_t i = 0; i < ac_dim; ++i)
      for (std::size_t ci = 0; ci < c_dim; ++ci)
        slice(i, ci) = m_plus(i, a_off[ai] + c_off[ci]);
    kraus.push_back(slice * c_minus);
  }

  // Completion off the support of rho_c: prepare rho_ac.
  const double c_cutoff = default_support_cutoff(eig_c.eigenvalues);
  std::vector<std::vector<cplx>> kernel_basis;
  for (std::size_t k = 0; k < eig_c.eigenvalues.size(); ++k) {
    if (eig_c.eigenvalues[k] <= c_cutoff) {
      std::vector<cplx> b(c_dim);
      for (std::size_t i = 0; i < c_dim; ++i) b[i] = eig_c.eigenvectors(i, k);
      kernel_basis.push_back(std::move(b));
    }
  }
  if (!kernel_basis.empty()) {
    for (const std::vector<cplx>& w : sqrt_factors(rho_ac.matrix(), tol.hermiticity)) {
      for (const std::vector<cplx>& b : kernel_basis) {
        ComplexMatrix k(ac_dim, c_dim);
        for (std::size_t i = 0; i < ac_dim; ++i)
          for (std::size_t j = 0; j < c_dim; ++j) k(i, j) = w[i] * std::conj(b[j]);
        kraus.push_back(std::move(k));
      }
    }
  }

  try {
    return Channel(std::move(c_layout), rho_ac.layout(), std::move(kraus), 1e-8);
  } catch (const LayoutMismatch& e) {
    throw SingularMarginal(std::string("Petz map not trace preserving: ") + e.what());
  }
}

Channel eb_channel(const Povm& povm, const std::vector<DensityMatrix>& preps) {
  if (preps.size() != povm.outcomes())
    throw ArityMismatch("need one prepared state per outcome, got " +
                        std::to_string(preps.size()) + " for " +
                        std::to_string(povm.outcomes()));
  for (const DensityMatrix& p : preps)
    if (!(p.layout() == preps[0].layout()))
      throw LayoutMismatch("prepared states on differing layouts");

  std::vector<ComplexMatrix> kraus;
  for (std::size_t x = 0; x < povm.outcomes(); ++x) {
    const std::vector<std::vector<cplx>> phis =
        sqrt_factors(povm.effects()[x], 1e-9);
    const std::vector<std::vector<cplx>> ws =
        sqrt_factors(preps[x].matrix(), 1e-9);
    for (const std::vector<cplx>& w : ws)
      for (const std::vector<cplx>& phi : phis) {
        ComplexMatrix k(w.size(), povm.dim());
        for (std::size_t i = 0; i < w.size(); ++i)
          for (std::size_t j = 0; j < povm.dim(); ++j)
            k(i, j) = w[i] * std::conj(phi[j]);
        kraus.push_back(std::move(k));
      }
  }
  return Channel(SystemLayout::single(povm.system(), povm.dim()),
                 preps[0].layout(), std::move(kraus));
}

Channel channel_from_isometry(const ComplexMatrix& v, SystemLayout in_layout,
                              SystemLayout out_layout, std::size_t env_dim) {
  const std::size_t out_dim = out_layout.total_dim();
  if (v.rows() != out_dim * env_dim || v.cols() != in_layout.total_dim())
    throw LayoutMismatch("isometry shape mismatch");
  std::vector<ComplexMatrix> kraus;
  for (std::size_t e = 0; e < env_dim; ++e) {
    ComplexMatrix k(out_dim, v.cols());
    for (std::size_t i = 0; i < out_dim; ++i)
      for (std::size_t j = 0; j < v.cols(); ++j) k(i, j) = v(i * env_dim + e, j);
    if (k.max_abs() > 1e-14) kraus.push_back(std::move(k));
  }
  return Channel(std::move(in_layout), std::move(out_layout), std::move(kraus));
}

}  // namespace qcorr
