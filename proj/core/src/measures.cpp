#include "qcorr/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "qcorr/eig.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/tensor_ops.hpp"

namespace qcorr {

namespace {

std::vector<std::string> sorted(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  return labels;
}

void check_disjoint(const std::vector<std::vector<std::string>>& sets) {
  std::set<std::string> seen;
  for (const auto& s : sets)
    for (const std::string& l : s)
      if (!seen.insert(l).second)
        throw OverlappingSets("label '" + l + "' in two sets");
}

// Aligns sigma's subsystem order to rho's; label sets must agree.
DensityMatrix aligned(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.layout() == sigma.layout()) return sigma;
  std::vector<std::string> a = sorted(rho.layout().labels());
  std::vector<std::string> b = sorted(sigma.layout().labels());
  if (a != b)
    throw LayoutMismatch("states live on different label sets: " +
                         rho.layout().to_string() + " vs " +
                         sigma.layout().to_string());
  DensityMatrix out = sigma.reordered(rho.layout().labels());
  if (!(out.layout() == rho.layout()))
    throw LayoutMismatch("subsystem dimensions differ: " +
                         rho.layout().to_string() + " vs " +
                         sigma.layout().to_string());
  return out;
}

double entropy_from_eigenvalues(const std::vector<double>& eigenvalues,
                                double log_cutoff) {
  double h = 0.0;
  for (double l : eigenvalues)
    if (l > log_cutoff) h -= l * std::log(l);
  return std::max(0.0, h);
}

}  // namespace

double von_neumann_entropy(const DensityMatrix& rho, const ToleranceProfile& tol) {
  return entropy_from_eigenvalues(
      hermitian_eigenvalues(rho.matrix(), tol.hermiticity),
      tol.entropy_log_cutoff);
}

double SubsetEntropies::operator()(std::vector<std::string> labels) {
  if (labels.empty()) return 0.0;
  std::vector<std::string> key = sorted(std::move(labels));
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  double h;
  if (key.size() == rho_.layout().size()) {
    h = von_neumann_entropy(rho_, tol_);
  } else {
    h = von_neumann_entropy(partial_trace(rho_, key), tol_);
  }
  cache_.emplace(std::move(key), h);
  return h;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma_in,
                        const ToleranceProfile& tol) {
  const DensityMatrix sigma = aligned(rho, sigma_in);
  const HermitianEig seig = hermitian_eig(sigma.matrix(), tol.hermiticity);
  const double cutoff = default_support_cutoff(seig.eigenvalues);

  // <w_k| rho |w_k> for every sigma eigenvector.
  const std::size_t n = rho.dim();
  double tr_rho_ln_sigma = 0.0;
  double off_support_mass = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cplx expval = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += rho.matrix()(i, j) * seig.eigenvectors(j, k);
      expval += std::conj(seig.eigenvectors(i, k)) * row;
    }
    const double p = std::max(0.0, expval.real());
    if (seig.eigenvalues[k] > cutoff) {
      tr_rho_ln_sigma += p * std::log(seig.eigenvalues[k]);
    } else {
      off_support_mass += p;
    }
  }
  if (off_support_mass > 10.0 * tol.psd)
    return std::numeric_limits<double>::infinity();

  const double h_rho = von_neumann_entropy(rho, tol);
  return std::max(0.0, -h_rho - tr_rho_ln_sigma);
}

double fidelity(const DensityMatrix& omega, const DensityMatrix& tau_in,
                const ToleranceProfile& tol) {
  const DensityMatrix tau = aligned(omega, tau_in);
  const std::vector<double> oeigs =
      hermitian_eigenvalues(omega.matrix(), tol.hermiticity);
  const ComplexMatrix sqrt_omega = matrix_function_on_support(
      omega.matrix(), [](double l) { return cplx(std::sqrt(l), 0.0); },
      default_support_cutoff(oeigs), tol.hermiticity);
  const ComplexMatrix inner = sqrt_omega * tau.matrix() * sqrt_omega;
  double root_sum = 0.0;
  for (double l : hermitian_eigenvalues(inner.symmetrized(), 1e-8))
    root_sum += std::sqrt(std::max(0.0, l));
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& omega, const DensityMatrix& tau_in) {
  const DensityMatrix tau = aligned(omega, tau_in);
  return trace_norm(omega.matrix() - tau.matrix());
}

double multipartite_information(const DensityMatrix& rho,
                                const std::vector<std::vector<std::string>>& parts,
                                const ToleranceProfile& tol) {
  check_disjoint(parts);
  std::set<std::string> covered;
  for (const auto& p : parts) covered.insert(p.begin(), p.end());
  for (const std::string& l : rho.layout().labels())
    if (!covered.count(l))
      throw NotAPartition("label '" + l + "' not covered by any part");
  if (covered.size() != rho.layout().size())
    throw NotAPartition("parts mention labels outside the layout");

  SubsetEntropies h(rho, tol);
  double sum = 0.0;
  for (const auto& p : parts) sum += h(p);
  return sum - h(rho.layout().labels());
}

double conditional_mutual_information(const DensityMatrix& rho,
                                      const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& c,
                                      const ToleranceProfile& tol) {
  check_disjoint({a, b, c});
  SubsetEntropies h(rho, tol);
  auto join = [](std::initializer_list<const std::vector<std::string>*> sets) {
    std::vector<std::string> out;
    for (const auto* s : sets) out.insert(out.end(), s->begin(), s->end());
    return out;
  };
  return h(join({&a, &c})) + h(join({&b, &c})) - h(c) - h(join({&a, &b, &c}));
}

double conditional_multipartite_information(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const std::vector<std::string>& e, const ToleranceProfile& tol) {
  std::vector<std::vector<std::string>> all = parts;
  all.push_back(e);
  check_disjoint(all);

  SubsetEntropies h(rho, tol);
  const double he = h(e);
  double sum = 0.0;
  std::vector<std::string> whole = e;
  for (const auto& p : parts) {
    std::vector<std::string> pe = p;
    pe.insert(pe.end(), e.begin(), e.end());
    sum += h(pe) - he;
    whole.insert(whole.end(), p.begin(), p.end());
  }
  return sum - (h(whole) - he);
}

namespace {

void check_pair_partition(const DensityMatrix& rho,
                          const std::vector<PartyPair>& pairs) {
  std::vector<std::vector<std::string>> sets;
  for (const PartyPair& p : pairs) {
    if (p.a.empty() && p.prime.empty())
      throw NotAPartition("a party pair with both sides empty");
    sets.push_back(p.a);
    sets.push_back(p.prime);
  }
  check_disjoint(sets);
  std::set<std::string> covered;
  for (const auto& s : sets) covered.insert(s.begin(), s.end());
  for (const std::string& l : rho.layout().labels())
    if (!covered.count(l))
      throw NotAPartition("label '" + l + "' not covered; trace it explicitly");
  if (covered.size() != rho.layout().size())
    throw NotAPartition("pairs mention labels outside the layout");
}

// Multipartite information over possibly-empty parts of a subset state:
// empty parts contribute zero marginal entropy.
double info_over_parts(SubsetEntropies& h,
                       const std::vector<std::vector<std::string>>& parts) {
  std::vector<std::string> whole;
  double sum = 0.0;
  for (const auto& p : parts) {
    sum += h(p);
    whole.insert(whole.end(), p.begin(), p.end());
  }
  if (whole.empty()) return 0.0;
  return sum - h(whole);
}

}  // namespace

double gap(const DensityMatrix& rho, const std::vector<PartyPair>& pairs,
           const ToleranceProfile& tol) {
  check_pair_partition(rho, pairs);
  SubsetEntropies h(rho, tol);

  std::vector<std::vector<std::string>> joined, primes;
  for (const PartyPair& p : pairs) {
    std::vector<std::string> j = p.a;
    j.insert(j.end(), p.prime.begin(), p.prime.end());
    joined.push_back(std::move(j));
    primes.push_back(p.prime);
  }
  return info_over_parts(h, joined) - info_over_parts(h, primes);
}

GapExpansion chain_gap_expansion(const DensityMatrix& rho,
                                 const std::vector<PartyPair>& pairs,
                                 const std::vector<std::size_t>& order,
                                 const ToleranceProfile& tol,
                                 SubsetEntropies* cache) {
  check_pair_partition(rho, pairs);
  const std::size_t l = pairs.size();
  if (order.size() != l) throw NotAPartition("order length != number of pairs");
  std::vector<bool> hit(l, false);
  for (std::size_t i : order) {
    if (i >= l || hit[i]) throw NotAPartition("order is not a permutation");
    hit[i] = true;
  }

  SubsetEntropies local(rho, tol);
  SubsetEntropies& h = cache ? *cache : local;

  // Term for the j-th decoded party p: I(A_p ; A_{earlier} A'_{others} | A'_p).
  GapExpansion out;
  out.order = order;
  std::vector<std::string> earlier_a;
  for (std::size_t j = 0; j < l; ++j) {
    const std::size_t p = order[j];
    std::vector<std::string> b = earlier_a;
    for (std::size_t q = 0; q < l; ++q)
      if (q != p) b.insert(b.end(), pairs[q].prime.begin(), pairs[q].prime.end());
    const std::vector<std::string>& a = pairs[p].a;
    const std::vector<std::string>& c = pairs[p].prime;

    auto join = [](const std::vector<std::string>& x, const std::vector<std::string>& y) {
      std::vector<std::string> out = x;
      out.insert(out.end(), y.begin(), y.end());
      return out;
    };
    const double term =
        h(join(a, c)) + h(join(b, c)) - h(c) - h(join(join(a, b), c));
    out.terms.emplace_back(p, term);
    out.total += term;
    earlier_a.insert(earlier_a.end(), a.begin(), a.end());
  }
  return out;
}

PsdRates psd_rates(const PureState& phi, const std::vector<PartyPair>& pairs,
                   const std::vector<std::size_t>& order,
                   const ToleranceProfile& tol) {
  std::set<std::string> in_pairs;
  for (const PartyPair& p : pairs) {
    in_pairs.insert(p.a.begin(), p.a.end());
    in_pairs.insert(p.prime.begin(), p.prime.end());
  }
  std::vector<std::string> keep;
  for (const std::string& l : phi.layout().labels())
    if (in_pairs.count(l)) keep.push_back(l);
  if (keep.empty()) throw NotAPartition("pairs name no label of the state");

  const DensityMatrix rho = partial_trace(phi.density(), keep);
  const GapExpansion exp = chain_gap_expansion(rho, pairs, order, tol);

  PsdRates rates;
  for (const auto& [party, value] : exp.terms) rates.per_round.push_back(value);
  rates.total = exp.total;
  rates.total_rate = 0.5 * exp.total;
  return rates;
}

DiscordAsCmi unoptimized_discord_as_cmi(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const std::vector<std::optional<Povm>>& povms, const ToleranceProfile& tol) {
  if (povms.size() != parts.size())
    throw ArityMismatch("one (optional) POVM per party required");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!povms[i]) continue;
    if (parts[i].size() != 1)
      throw ArityMismatch("measured party " + std::to_string(i) +
                          " must be a single subsystem");
    if (parts[i][0] != povms[i]->system())
      throw LayoutMismatch("POVM system '" + povms[i]->system() +
                           "' does not match party label '" + parts[i][0] + "'");
  }

  const double i_rho = multipartite_information(rho, parts, tol);

  // Measured state (classical registers keep the party labels).
  DensityMatrix measured = rho;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (povms[i]) measured = apply_channel(measurement_channel(*povms[i]), measured);
  const double i_x = multipartite_information(measured, parts, tol);

  // Isometrically extended state; party i becomes {X_i, E_i}.
  DensityMatrix extended = rho;
  std::vector<std::vector<std::string>> parts_ext = parts;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!povms[i]) continue;
    const IsometricExtension ext = isometric_extension(*povms[i]);
    extended = apply_channel(ext.as_channel(), extended);
    parts_ext[i] = {ext.x_label, ext.e_label};
  }
  const double i_xe = multipartite_information(extended, parts_ext, tol);

  return DiscordAsCmi{i_rho - i_x, i_xe - i_x};
}

double binary_entropy(double eps) {
  if (eps < 0.0 || eps > 1.0)
    throw DomainError("binary entropy argument " + std::to_string(eps));
  double h = 0.0;
  if (eps > 0.0) h -= eps * std::log(eps);
  if (eps < 1.0) h -= (1.0 - eps) * std::log(1.0 - eps);
  return h;
}

double msq_discord_upper_bound(double eps, const std::vector<std::size_t>& dims) {
  if (eps < 0.0 || eps > 1.0)
    throw DomainError("epsilon " + std::to_string(eps) + " outside [0,1]");
  const double l = static_cast<double>(dims.size());
  double log_dims = 0.0;
  for (std::size_t d : dims) log_dims += std::log(static_cast<double>(d));
  return (l + 1.0) * binary_entropy(eps / 2.0) + eps * log_dims;
}

double fannes_audenaert_bound(double t, std::size_t d) {
  if (t < 0.0 || t > 1.0) throw DomainError("T outside [0,1]");
  if (d < 2) throw DomainError("dimension must be >= 2");
  return t * std::log(static_cast<double>(d - 1)) + binary_entropy(t);
}

DimensionBoundSides dimension_bound_check(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& c_parts,
    const std::vector<std::vector<std::string>>& d_parts,
    const ToleranceProfile& tol) {
  if (c_parts.size() != d_parts.size())
    throw NotAPartition("need one D block per C block");
  std::vector<PartyPair> pairs;
  for (std::size_t i = 0; i < c_parts.size(); ++i)
    pairs.push_back(PartyPair{c_parts[i], d_parts[i]});
  check_pair_partition(rho, pairs);

  SubsetEntropies h(rho, tol);
  std::vector<std::vector<std::string>> joined;
  for (const PartyPair& p : pairs) {
    std::vector<std::string> j = p.a;
    j.insert(j.end(), p.prime.begin(), p.prime.end());
    joined.push_back(std::move(j));
  }
  DimensionBoundSides sides;
  sides.lhs = info_over_parts(h, joined);

  double log_d = 0.0;
  for (const auto& dp : d_parts)
    for (const std::string& l : dp)
      log_d += std::log(static_cast<double>(rho.layout().dim_of(l)));
  sides.rhs = info_over_parts(h, c_parts) + 2.0 * log_d;
  return sides;
}

}  // namespace qcorr
