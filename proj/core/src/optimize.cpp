#include "qcorr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "qcorr/eig.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/states_library.hpp"
#include "qcorr/tensor_ops.hpp"

namespace qcorr {

std::vector<double> petz_t_grid() {
  std::vector<double> grid;
  const double span = std::tanh(2.5);
  for (int k = 0; k <= 40; ++k) {
    const double u = -1.0 + 2.0 * k / 40.0;
    grid.push_back(10.0 * std::tanh(2.5 * u) / span);
  }
  grid[20] = 0.0;  // exact center
  return grid;
}

ComplexMatrix unitary_from_generator(const ComplexMatrix& h) {
  const HermitianEig eig = hermitian_eig(h.symmetrized(), 1e-8);
  const std::size_t n = h.rows();
  ComplexMatrix u(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx phase = std::polar(1.0, eig.eigenvalues[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vik = eig.eigenvectors(i, k) * phase;
      for (std::size_t j = 0; j < n; ++j)
        u(i, j) += vik * std::conj(eig.eigenvectors(j, k));
    }
  }
  return u;
}

std::vector<double> adaptive_descent(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> init, CounterRng& rng, std::size_t max_iters,
    double step_init, double* best_value) {
  std::vector<double> x = std::move(init);
  double best = objective(x);
  double step = step_init;
  std::vector<double> proposal(x.size());
  for (std::size_t iter = 0; iter < max_iters && step > 1e-10; ++iter) {
    proposal = x;
    if (x.size() > 8 && rng.next_below(2) == 0) {
      // Sparse move: a random handful of coordinates, larger amplitude.
      const std::size_t touches = 1 + rng.next_below(std::max<std::size_t>(x.size() / 8, 1));
      for (std::size_t t = 0; t < touches; ++t)
        proposal[rng.next_below(x.size())] += 3.0 * step * rng.next_gaussian();
    } else {
      for (std::size_t i = 0; i < x.size(); ++i)
        proposal[i] += step * rng.next_gaussian();
    }
    const double v = objective(proposal);
    if (v < best) {
      best = v;
      x = proposal;
      step *= 1.5;
    } else {
      step *= 0.93;
    }
  }
  if (best_value) *best_value = best;
  return x;
}

DensityMatrix reorder_for_parts(const DensityMatrix& rho,
                                const std::vector<std::vector<std::string>>& parts) {
  std::set<std::string> used;
  std::vector<std::string> order;
  for (const auto& p : parts)
    for (const std::string& l : p) {
      if (!used.insert(l).second) throw OverlappingSets("label '" + l + "' repeated");
      order.push_back(l);
    }
  for (const std::string& l : rho.layout().labels())
    if (!used.count(l)) order.push_back(l);
  return rho.reordered(order);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PartBlocks {
  DensityMatrix state;                 // parts contiguous, in order
  std::vector<std::size_t> dims;       // joint dimension per part
  std::vector<std::string> merged_names;
  std::vector<std::vector<std::string>> labels;  // per part, reordered state
};

PartBlocks make_blocks(const DensityMatrix& rho,
                       const std::vector<std::vector<std::string>>& parts,
                       bool require_partition) {
  if (require_partition) {
    std::size_t count = 0;
    for (const auto& p : parts) count += p.size();
    if (count != rho.layout().size())
      throw NotAPartition("parts must cover the layout");
  }
  PartBlocks b;
  b.state = reorder_for_parts(rho, parts);
  for (const auto& p : parts) {
    if (p.empty()) throw NotAPartition("empty part");
    std::size_t d = 1;
    std::string name;
    for (const std::string& l : p) {
      d *= rho.layout().dim_of(l);
      name += (name.empty() ? "" : "+") + l;
    }
    b.dims.push_back(d);
    b.merged_names.push_back(name);
    b.labels.push_back(p);
  }
  return b;
}

// Joint outcome table digits for mixed-radix block dimensions.
class BlockIndex {
public:
  explicit BlockIndex(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    strides_.assign(dims_.size(), 1);
    total_ = 1;
    for (std::size_t i = dims_.size(); i-- > 0;) {
      strides_[i] = total_;
      total_ *= dims_[i];
    }
  }
  std::size_t total() const { return total_; }
  std::size_t digit(std::size_t index, std::size_t slot) const {
    return (index / strides_[slot]) % dims_[slot];
  }
  const std::vector<std::size_t>& dims() const { return dims_; }

private:
  std::vector<std::size_t> dims_, strides_;
  std::size_t total_ = 0;
};

double classical_multipartite_information(const std::vector<double>& joint,
                                          const BlockIndex& idx) {
  auto h = [](const std::vector<double>& p) {
    double s = 0.0;
    for (double x : p)
      if (x > 1e-15) s -= x * std::log(x);
    return s;
  };
  double sum_marginals = 0.0;
  for (std::size_t i = 0; i < idx.dims().size(); ++i) {
    std::vector<double> m(idx.dims()[i], 0.0);
    for (std::size_t j = 0; j < joint.size(); ++j) m[idx.digit(j, i)] += joint[j];
    sum_marginals += h(m);
  }
  return sum_marginals - h(joint);
}

ComplexMatrix kron_all(const std::vector<ComplexMatrix>& ms) {
  ComplexMatrix out = ms.front();
  for (std::size_t i = 1; i < ms.size(); ++i) out = kron(out, ms[i]);
  return out;
}

// ---------------------------------------------------------------------------
// MSQ discord search state
// ---------------------------------------------------------------------------

struct DiscordProblem {
  ComplexMatrix rho;         // working matrix (parts contiguous, ancillas attached)
  BlockIndex blocks;         // block dims (with ancilla when enabled)
  std::vector<std::size_t> base_dims;  // block dims without ancilla
  bool naimark = false;

  double classical_info(const std::vector<ComplexMatrix>& bases) const {
    const ComplexMatrix u = kron_all(bases);
    const ComplexMatrix rot = u.adjoint() * rho * u;
    std::vector<double> joint(rot.rows());
    for (std::size_t i = 0; i < rot.rows(); ++i)
      joint[i] = std::max(0.0, rot(i, i).real());
    return classical_multipartite_information(joint, blocks);
  }
};

std::vector<Povm> povms_from_bases(const DiscordProblem& prob,
                                   const std::vector<ComplexMatrix>& bases,
                                   const std::vector<std::string>& names) {
  std::vector<Povm> out;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (!prob.naimark) {
      out.push_back(Povm::projective(names[i], bases[i]));
      continue;
    }
    // Pull the extended projective measurement back through the |0> ancilla.
    const std::size_t d = prob.base_dims[i];
    const std::size_t ext = bases[i].rows();
    std::vector<ComplexMatrix> effects;
    for (std::size_t x = 0; x < ext; ++x) {
      ComplexMatrix e(d, d);
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q)
          e(p, q) = std::conj(bases[i](2 * p, x)) * bases[i](2 * q, x);
      effects.push_back(std::move(e));
    }
    out.emplace_back(names[i], d, std::move(effects));
  }
  return out;
}

}  // namespace

MsqDiscordResult msq_discord(const DensityMatrix& rho,
                             const std::vector<std::vector<std::string>>& parts,
                             const OptimizerConfig& cfg,
                             const std::vector<std::vector<ComplexMatrix>>& warm_start_bases,
                             const ToleranceProfile& tol) {
  const double i_parts = multipartite_information(rho, parts, tol);
  PartBlocks blocks = make_blocks(rho, parts, /*require_partition=*/true);
  const std::size_t l = parts.size();

  DiscordProblem prob{blocks.state.matrix(), BlockIndex(blocks.dims),
                      blocks.dims, cfg.general_povms};
  if (cfg.general_povms) {
    // One qubit of Naimark ancilla per party, prepared in |0>.
    DensityMatrix work = blocks.state;
    std::vector<std::vector<std::string>> ext_parts = blocks.labels;
    for (std::size_t i = 0; i < l; ++i) {
      ComplexMatrix anc(2, 2);
      anc(0, 0) = 1.0;
      const std::string anc_label = "naimark#" + std::to_string(i);
      work = tensor(work, DensityMatrix::trusted(
                              SystemLayout::single(anc_label, 2), std::move(anc)));
      ext_parts[i].push_back(anc_label);
    }
    PartBlocks ext = make_blocks(work, ext_parts, true);
    prob.rho = ext.state.matrix();
    prob.blocks = BlockIndex(ext.dims);
  }

  const std::vector<std::size_t>& search_dims =
      cfg.general_povms ? prob.blocks.dims() : blocks.dims;

  // Start list: computational basis, marginal eigenbases, caller warm
  // starts, then seeded random bases.
  std::vector<std::vector<ComplexMatrix>> starts;
  {
    std::vector<ComplexMatrix> ident;
    for (std::size_t d : search_dims) ident.push_back(ComplexMatrix::identity(d));
    starts.push_back(ident);

    std::vector<ComplexMatrix> marg;
    for (std::size_t i = 0; i < l; ++i) {
      DensityMatrix m = partial_trace(blocks.state, blocks.labels[i]);
      ComplexMatrix basis = hermitian_eig(m.matrix(), 1e-8).eigenvectors;
      if (cfg.general_povms) basis = kron(basis, ComplexMatrix::identity(2));
      marg.push_back(std::move(basis));
    }
    starts.push_back(std::move(marg));

    for (const auto& ws : warm_start_bases) {
      if (ws.size() != l) continue;
      std::vector<ComplexMatrix> s = ws;
      bool ok = true;
      for (std::size_t i = 0; i < l; ++i) {
        if (cfg.general_povms && s[i].rows() == search_dims[i] / 2)
          s[i] = kron(s[i], ComplexMatrix::identity(2));
        if (s[i].rows() != search_dims[i]) ok = false;
      }
      if (ok) starts.push_back(std::move(s));
    }
  }
  CounterRng root(cfg.seed);
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    CounterRng rng = root.derive(1000 + r);
    std::vector<ComplexMatrix> s;
    for (std::size_t d : search_dims) s.push_back(random_unitary(d, rng));
    starts.push_back(std::move(s));
  }

  double best_ix = -kInf;
  std::vector<ComplexMatrix> best_bases;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    CounterRng rng = root.derive(5000 + s);
    std::vector<ComplexMatrix> bases = starts[s];
    double cur = prob.classical_info(bases);
    double step = cfg.step_init;
    for (std::size_t iter = 0; iter < cfg.max_iters && step > 1e-7; ++iter) {
      const std::size_t party = rng.next_below(l);
      const std::size_t d = search_dims[party];
      ComplexMatrix g(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          g(i, j) = cplx(rng.next_gaussian(), rng.next_gaussian());
      g = g.symmetrized();
      g *= cplx(step, 0.0);
      const ComplexMatrix candidate = unitary_from_generator(g) * bases[party];
      std::vector<ComplexMatrix> trial = bases;
      trial[party] = candidate;
      const double v = prob.classical_info(trial);
      if (v > cur) {
        cur = v;
        bases = std::move(trial);
        step *= 1.3;
      } else {
        step *= 0.8;
      }
    }
    if (cur > best_ix + 1e-15) {
      best_ix = cur;
      best_bases = bases;
    }
  }
  if (best_bases.empty()) throw OptimizerFailure("no valid measurement basis found");

  MsqDiscordResult out;
  out.best_classical = best_ix;
  out.value = i_parts - best_ix;
  out.best_povms = povms_from_bases(prob, best_bases, blocks.merged_names);
  return out;
}

// ---------------------------------------------------------------------------
// Recovery optimization
// ---------------------------------------------------------------------------

namespace {

// Trace-preserving channel from unconstrained Kraus blocks via
// K_j = L_j S^{-1/2}, S = sum L^dag L. Returns nothing if S is singular.
std::optional<Channel> channel_from_raw_kraus(const SystemLayout& in_layout,
                                              const SystemLayout& out_layout,
                                              const std::vector<ComplexMatrix>& raw) {
  ComplexMatrix s(in_layout.total_dim(), in_layout.total_dim());
  for (const ComplexMatrix& k : raw) s += k.adjoint() * k;
  const HermitianEig eig = hermitian_eig(s.symmetrized(), 1e-8);
  if (eig.eigenvalues.front() < 1e-12) return std::nullopt;
  ComplexMatrix inv_sqrt(s.rows(), s.cols());
  for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
    const double w = 1.0 / std::sqrt(eig.eigenvalues[k]);
    for (std::size_t i = 0; i < s.rows(); ++i) {
      const cplx vik = eig.eigenvectors(i, k) * w;
      for (std::size_t j = 0; j < s.cols(); ++j)
        inv_sqrt(i, j) += vik * std::conj(eig.eigenvectors(j, k));
    }
  }
  std::vector<ComplexMatrix> kraus;
  for (const ComplexMatrix& k : raw) kraus.push_back(k * inv_sqrt);
  try {
    return Channel(in_layout, out_layout, std::move(kraus), 1e-7);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

RecoveryResult optimize_recovery(const DensityMatrix& rho,
                                 const std::vector<std::string>& lost,
                                 const std::vector<std::string>& anchor,
                                 const OptimizerConfig& cfg,
                                 const ToleranceProfile& tol) {
  std::set<std::string> lost_set(lost.begin(), lost.end());
  std::vector<std::string> ac_labels, keep_labels;
  for (const std::string& l : rho.layout().labels()) {
    if (lost_set.count(l) || std::count(anchor.begin(), anchor.end(), l))
      ac_labels.push_back(l);
    if (!lost_set.count(l)) keep_labels.push_back(l);
  }
  const DensityMatrix rho_ac = partial_trace(rho, ac_labels);
  const DensityMatrix sigma = partial_trace(rho, keep_labels);

  double best_fid = -1.0;
  double best_t = 0.0;
  std::optional<Channel> best_channel;
  for (double t : petz_t_grid()) {
    Channel ch = petz_recovery(rho_ac, anchor, t, tol);
    const double f = fidelity(rho, apply_channel(ch, sigma), tol);
    if (f > best_fid + 1e-15) {
      best_fid = f;
      best_t = t;
      best_channel = std::move(ch);
    }
  }
  if (!best_channel) throw OptimizerFailure("Petz grid produced no channel");

  // Kraus-space ascent around the best grid point.
  if (cfg.max_iters > 0 && best_fid < 1.0 - 1e-12) {
    const std::vector<ComplexMatrix> base = best_channel->kraus();
    const SystemLayout in_layout = best_channel->in_layout();
    const SystemLayout out_layout = best_channel->out_layout();
    std::size_t n_params = 0;
    for (const ComplexMatrix& k : base) n_params += 2 * k.rows() * k.cols();

    const auto decode = [&](const std::vector<double>& p) {
      std::vector<ComplexMatrix> raw = base;
      std::size_t ix = 0;
      for (ComplexMatrix& k : raw)
        for (cplx& z : k.entries()) {
          z += cplx(p[ix], p[ix + 1]);
          ix += 2;
        }
      return channel_from_raw_kraus(in_layout, out_layout, raw);
    };
    const auto objective = [&](const std::vector<double>& p) {
      const std::optional<Channel> ch = decode(p);
      if (!ch) return 1.0;
      return -fidelity(rho, apply_channel(*ch, sigma), tol);
    };

    CounterRng rng = CounterRng(cfg.seed).derive(77);
    double refined = 0.0;
    const std::vector<double> p = adaptive_descent(
        objective, std::vector<double>(n_params, 0.0), rng,
        std::max<std::size_t>(cfg.max_iters / 2, 50), 0.05 * cfg.step_init,
        &refined);
    if (-refined > best_fid) {
      if (std::optional<Channel> ch = decode(p)) {
        best_fid = -refined;
        best_channel = std::move(*ch);
      }
    }
  }

  return RecoveryResult{std::move(*best_channel), std::clamp(best_fid, 0.0, 1.0),
                        best_t};
}

LocalRecoverySuite local_recovery_suite(const DensityMatrix& rho,
                                        const std::vector<PartyPair>& pairs,
                                        const std::vector<bool>& mask,
                                        const OptimizerConfig&,
                                        const ToleranceProfile& tol) {
  if (mask.size() != pairs.size()) throw ArityMismatch("mask length != l");
  LocalRecoverySuite out;
  out.channels.resize(pairs.size());
  out.lhs = gap(rho, pairs, tol);

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (mask[i] && !pairs[i].a.empty()) {
      if (pairs[i].prime.empty())
        throw LayoutMismatch("masked party " + std::to_string(i) +
                             " has no prime system to recover from");
      active.push_back(i);
    }

  const std::size_t ones = std::count(mask.begin(), mask.end(), true);
  const double jnorm = std::max<std::size_t>(ones, 1);

  if (active.empty()) {
    out.rhs = 0.0;
    out.dist = 0.0;
    return out;
  }

  // Keep everything except the masked-away A systems.
  std::set<std::string> dropped;
  for (std::size_t i : active) dropped.insert(pairs[i].a.begin(), pairs[i].a.end());
  std::vector<std::string> keep;
  for (const std::string& l : rho.layout().labels())
    if (!dropped.count(l)) keep.push_back(l);
  const DensityMatrix stripped = partial_trace(rho, keep);

  // Rotated-Petz family per active party, built from the pair marginal.
  const std::vector<double> grid = petz_t_grid();
  std::map<std::pair<std::size_t, std::size_t>, Channel> channel_cache;
  const auto channel_at = [&](std::size_t party, std::size_t gi) -> const Channel& {
    const auto key = std::make_pair(party, gi);
    auto it = channel_cache.find(key);
    if (it == channel_cache.end()) {
      std::vector<std::string> pair_labels = pairs[party].a;
      pair_labels.insert(pair_labels.end(), pairs[party].prime.begin(),
                         pairs[party].prime.end());
      const DensityMatrix marginal = partial_trace(rho, pair_labels);
      it = channel_cache
               .emplace(key, petz_recovery(marginal, pairs[party].prime, grid[gi], tol))
               .first;
    }
    return it->second;
  };

  const auto distance_for = [&](const std::vector<std::size_t>& grid_ix) {
    DensityMatrix state = stripped;
    for (std::size_t j = 0; j < active.size(); ++j)
      state = apply_channel(channel_at(active[j], grid_ix[j]), state);
    return trace_distance(rho, state);
  };

  std::vector<std::size_t> t_ix(active.size(), 20);  // t = 0 start
  double best = distance_for(t_ix);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < active.size(); ++j) {
      for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        if (gi == t_ix[j]) continue;
        std::vector<std::size_t> trial = t_ix;
        trial[j] = gi;
        const double d = distance_for(trial);
        if (d < best - 1e-15) {
          best = d;
          t_ix = trial;
        }
      }
    }
  }

  for (std::size_t j = 0; j < active.size(); ++j)
    out.channels[active[j]] = channel_at(active[j], t_ix[j]);
  out.dist = best;
  out.rhs = (best / (2.0 * jnorm)) * (best / (2.0 * jnorm));
  return out;
}

// ---------------------------------------------------------------------------
// Surprisal of measurement recoverability
// ---------------------------------------------------------------------------

SurprisalResult surprisal_of_measurement_recoverability(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const OptimizerConfig& cfg, const ToleranceProfile& tol) {
  PartBlocks blocks = make_blocks(rho, parts, true);
  const std::size_t l = parts.size();
  const DensityMatrix& work = blocks.state;

  // Working layout with merged single-label parties keeps the channel
  // plumbing one-dimensional per party.
  std::vector<Subsystem> merged_subs;
  for (std::size_t i = 0; i < l; ++i)
    merged_subs.push_back({blocks.merged_names[i], blocks.dims[i]});
  const SystemLayout merged_layout{merged_subs};
  const DensityMatrix merged =
      DensityMatrix::trusted(merged_layout, work.matrix());

  // Per-party parameter block: a complex d x d generator for the basis
  // rotation plus d complex d x d matrices for the prepared states.
  std::vector<std::size_t> offsets(l + 1, 0);
  for (std::size_t i = 0; i < l; ++i) {
    const std::size_t d = blocks.dims[i];
    offsets[i + 1] = offsets[i] + 2 * d * d + 2 * d * d * d;
  }

  struct WarmStart {
    std::vector<ComplexMatrix> bases;
    std::vector<std::vector<ComplexMatrix>> preps;  // [party][outcome]
  };
  std::vector<WarmStart> warm;
  {
    WarmStart comp;
    WarmStart marg;
    for (std::size_t i = 0; i < l; ++i) {
      const std::size_t d = blocks.dims[i];
      comp.bases.push_back(ComplexMatrix::identity(d));
      const DensityMatrix m = partial_trace(work, blocks.labels[i]);
      marg.bases.push_back(hermitian_eig(m.matrix(), 1e-8).eigenvectors);
      std::vector<ComplexMatrix> comp_preps, marg_preps;
      for (std::size_t x = 0; x < d; ++x) {
        ComplexMatrix cp(d, d);
        cp(x, x) = 1.0;
        comp_preps.push_back(cp);
        ComplexMatrix mp(d, d);
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c)
            mp(r, c) = marg.bases[i](r, x) * std::conj(marg.bases[i](c, x));
        marg_preps.push_back(mp);
      }
      comp.preps.push_back(std::move(comp_preps));
      marg.preps.push_back(std::move(marg_preps));
    }
    warm.push_back(std::move(comp));
    warm.push_back(std::move(marg));
  }

  const auto fidelity_for = [&](const WarmStart& base,
                                const std::vector<double>& p) -> double {
    DensityMatrix state = merged;
    for (std::size_t i = 0; i < l; ++i) {
      const std::size_t d = blocks.dims[i];
      std::size_t ix = offsets[i];
      ComplexMatrix g(d, d);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
          g(r, c) = cplx(p[ix], p[ix + 1]);
          ix += 2;
        }
      const ComplexMatrix u = unitary_from_generator(g) * base.bases[i];
      std::vector<DensityMatrix> preps;
      for (std::size_t x = 0; x < d; ++x) {
        ComplexMatrix m(d, d);
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c) {
            m(r, c) = base.preps[i][x](r, c) + cplx(p[ix], p[ix + 1]);
            ix += 2;
          }
        ComplexMatrix sig = m * m.adjoint();
        double tr = sig.trace().real();
        if (tr < 1e-12) {
          sig = ComplexMatrix::identity(d);
          tr = static_cast<double>(d);
        }
        sig *= cplx(1.0 / tr, 0.0);
        preps.push_back(DensityMatrix::trusted(
            SystemLayout::single(blocks.merged_names[i], d), sig.symmetrized()));
      }
      const Povm povm = Povm::projective(blocks.merged_names[i], u);
      state = apply_channel(eb_channel(povm, preps), state);
    }
    return fidelity(merged, state, tol);
  };

  CounterRng root(cfg.seed);
  double best_f = -1.0;
  for (std::size_t s = 0; s < warm.size() + cfg.restarts; ++s) {
    const WarmStart& base = warm[s % warm.size()];
    CounterRng rng = root.derive(9000 + s);
    std::vector<double> init(offsets[l], 0.0);
    if (s >= warm.size()) {
      for (double& v : init) v = 0.5 * rng.next_gaussian();
    }
    double neg_f = 0.0;
    adaptive_descent(
        [&](const std::vector<double>& p) { return -fidelity_for(base, p); },
        std::move(init), rng, cfg.max_iters, cfg.step_init, &neg_f);
    best_f = std::max(best_f, -neg_f);
  }
  if (best_f < 0.0) throw OptimizerFailure("no EB channel evaluated");

  SurprisalResult out;
  out.best_fidelity = std::clamp(best_f, 0.0, 1.0);
  out.value = -std::log(std::max(out.best_fidelity, 1e-300));
  if (out.value < 0.0) out.value = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// CEMI search
// ---------------------------------------------------------------------------

double cemi_gap_for_extension(const DensityMatrix& rho_ext,
                              const std::vector<PartyPair>& pairs,
                              const ToleranceProfile& tol) {
  return gap(rho_ext, pairs, tol);
}

namespace {

struct FlagFamily {
  ComplexMatrix psi;   // system x rank amplitude matrix of the purification
  std::vector<std::size_t> part_dims;
  std::size_t rank = 0;
  std::size_t outcomes = 0;

  std::vector<std::vector<cplx>> ensemble(const ComplexMatrix& v) const {
    // v is outcomes x rank with orthonormal columns.
    std::vector<std::vector<cplx>> terms(outcomes,
                                         std::vector<cplx>(psi.rows(), 0.0));
    for (std::size_t x = 0; x < outcomes; ++x)
      for (std::size_t s = 0; s < psi.rows(); ++s) {
        cplx acc = 0.0;
        for (std::size_t r = 0; r < rank; ++r) acc += v(x, r) * psi(s, r);
        terms[x][s] = acc;
      }
    return terms;
  }

  // Weighted non-productness of the ensemble terms.
  double penalty(const ComplexMatrix& v) const {
    const BlockIndex idx(part_dims);
    double total = 0.0;
    for (const std::vector<cplx>& term : ensemble(v)) {
      double q = 0.0;
      for (const cplx& a : term) q += std::norm(a);
      if (q < 1e-14) continue;
      double nonproduct = 0.0;
      for (std::size_t i = 0; i < part_dims.size(); ++i) {
        // purity of the i-th single-block marginal of the normalized term
        const std::size_t d = part_dims[i];
        ComplexMatrix m(d, d);
        for (std::size_t u = 0; u < term.size(); ++u) {
          for (std::size_t w = 0; w < term.size(); ++w) {
            bool same_rest = true;
            for (std::size_t jslot = 0; jslot < part_dims.size(); ++jslot) {
              if (jslot == i) continue;
              if (idx.digit(u, jslot) != idx.digit(w, jslot)) {
                same_rest = false;
                break;
              }
            }
            if (same_rest) m(idx.digit(u, i), idx.digit(w, i)) += term[u] * std::conj(term[w]);
          }
        }
        double purity = 0.0;
        for (std::size_t r = 0; r < d; ++r)
          for (std::size_t c = 0; c < d; ++c) purity += std::norm(m(r, c));
        purity /= q * q;
        nonproduct += std::max(0.0, 1.0 - purity);
      }
      total += q * nonproduct / static_cast<double>(part_dims.size());
    }
    return total;
  }
};

}  // namespace

CemiSearchResult cemi_upper_bound_search(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const std::vector<std::size_t>& ext_dims, const OptimizerConfig& cfg,
    const ToleranceProfile& tol) {
  if (ext_dims.size() != parts.size())
    throw ArityMismatch("one extension dimension per part");
  PartBlocks blocks = make_blocks(rho, parts, true);
  const std::size_t l = parts.size();
  const DensityMatrix& work = blocks.state;

  std::vector<std::string> prime_labels;
  for (std::size_t i = 0; i < l; ++i) prime_labels.push_back(blocks.labels[i][0] + "'");

  const PureState phi = purify(work, "#ref", tol);
  const std::size_t rank = phi.layout().subsystems().back().dim;
  ComplexMatrix psi(work.dim(), rank);
  for (std::size_t s = 0; s < work.dim(); ++s)
    for (std::size_t r = 0; r < rank; ++r) psi(s, r) = phi.amplitudes()[s * rank + r];

  CounterRng root(cfg.seed);
  double best_gap = kInf;
  std::optional<DensityMatrix> best_ext;
  std::vector<PartyPair> best_pairs;

  // Pairs used by both families: parts against their fresh primes.
  std::vector<PartyPair> part_pairs;
  for (std::size_t i = 0; i < l; ++i)
    part_pairs.push_back(PartyPair{blocks.labels[i], {prime_labels[i]}});

  // --- Family A: measured-reference flag extensions -----------------------
  std::size_t outcomes = *std::min_element(ext_dims.begin(), ext_dims.end());
  outcomes = std::min<std::size_t>(outcomes, 8);
  if (outcomes >= rank) {
    FlagFamily fam{psi, blocks.dims, rank, outcomes};

    const auto decode_v = [&](const std::vector<double>& p) -> std::optional<ComplexMatrix> {
      ComplexMatrix raw(outcomes, rank);
      std::size_t ix = 0;
      for (std::size_t i = 0; i < outcomes; ++i)
        for (std::size_t j = 0; j < rank; ++j) {
          raw(i, j) = cplx(p[ix], p[ix + 1]);
          ix += 2;
        }
      try {
        return orthonormalized_columns(raw);
      } catch (const Error&) {
        return std::nullopt;
      }
    };

    const auto extension_for = [&](const ComplexMatrix& v) {
      const std::vector<std::vector<cplx>> terms = fam.ensemble(v);
      std::vector<Subsystem> subs = work.layout().subsystems();
      for (std::size_t i = 0; i < l; ++i) subs.push_back({prime_labels[i], outcomes});
      SystemLayout ext_layout{subs};
      std::size_t flags_total = 1;
      for (std::size_t i = 0; i < l; ++i) flags_total *= outcomes;
      ComplexMatrix m(work.dim() * flags_total, work.dim() * flags_total);
      for (std::size_t x = 0; x < outcomes; ++x) {
        // flag index with every prime digit equal to x
        std::size_t fx = 0;
        for (std::size_t i = 0; i < l; ++i) fx = fx * outcomes + x;
        for (std::size_t s = 0; s < work.dim(); ++s) {
          if (std::norm(terms[x][s]) < 1e-300) continue;
          for (std::size_t s2 = 0; s2 < work.dim(); ++s2)
            m(s * flags_total + fx, s2 * flags_total + fx) +=
                terms[x][s] * std::conj(terms[x][s2]);
        }
      }
      return DensityMatrix::trusted(std::move(ext_layout), std::move(m));
    };

    const std::vector<PartyPair>& pairs = part_pairs;
    const std::size_t n_params = 2 * outcomes * rank;
    for (std::size_t s = 0; s < cfg.restarts; ++s) {
      CounterRng rng = root.derive(3000 + s);
      std::vector<double> init(n_params);
      for (double& x : init) x = rng.next_gaussian();
      // Phase 1: drive the ensemble toward product terms (cheap objective).
      double pen = 0.0;
      std::vector<double> p = adaptive_descent(
          [&](const std::vector<double>& q) {
            const std::optional<ComplexMatrix> v = decode_v(q);
            return v ? fam.penalty(*v) : 1e6;
          },
          std::move(init), rng, cfg.max_iters, cfg.step_init, &pen);
      // Phase 2: polish on the true gap.
      double g = kInf;
      p = adaptive_descent(
          [&](const std::vector<double>& q) {
            const std::optional<ComplexMatrix> v = decode_v(q);
            if (!v) return 1e6;
            return gap(extension_for(*v), pairs, tol);
          },
          std::move(p), rng, std::max<std::size_t>(cfg.max_iters / 8, 30),
          0.2 * cfg.step_init, &g);
      if (g < best_gap) {
        const std::optional<ComplexMatrix> v = decode_v(p);
        if (v) {
          best_gap = g;
          best_ext = extension_for(*v);
          best_pairs = pairs;
        }
      }
    }
  }

  // --- Family B: generic channel on the purifying reference ---------------
  // Skipped when the flag family already drove the gap to zero.
  if (best_gap > 1e-4) {
    std::size_t prime_total = 1;
    for (std::size_t d : ext_dims) prime_total *= d;
    const std::size_t env = std::min<std::size_t>(rank, 4);
    if (prime_total * env * rank <= 16384) {
      std::vector<Subsystem> prime_subs;
      for (std::size_t i = 0; i < l; ++i)
        prime_subs.push_back({prime_labels[i], ext_dims[i]});
      SystemLayout prime_layout{prime_subs};
      const SystemLayout ref_layout = SystemLayout::single("#ref", rank);
      const std::vector<PartyPair>& pairs = part_pairs;

      const DensityMatrix phi_density = phi.density();
      const std::size_t n_params = 2 * prime_total * env * rank;
      const auto objective = [&](const std::vector<double>& p) -> double {
        ComplexMatrix raw(prime_total * env, rank);
        std::size_t ix = 0;
        for (std::size_t i = 0; i < raw.rows(); ++i)
          for (std::size_t j = 0; j < rank; ++j) {
            raw(i, j) = cplx(p[ix], p[ix + 1]);
            ix += 2;
          }
        try {
          const ComplexMatrix v = orthonormalized_columns(raw);
          const Channel ch = channel_from_isometry(v, ref_layout, prime_layout, env);
          return gap(apply_channel(ch, phi_density), pairs, tol);
        } catch (const Error&) {
          return 1e6;
        }
      };

      const std::size_t fam_b_restarts = std::max<std::size_t>(cfg.restarts / 2, 2);
      for (std::size_t s = 0; s < fam_b_restarts; ++s) {
        CounterRng rng = root.derive(4000 + s);
        std::vector<double> init(n_params);
        for (double& x : init) x = rng.next_gaussian();
        double g = kInf;
        std::vector<double> p = adaptive_descent(
            objective, std::move(init), rng,
            std::max<std::size_t>(cfg.max_iters / 4, 40), cfg.step_init, &g);
        if (g < best_gap) {
          ComplexMatrix raw(prime_total * env, rank);
          std::size_t ix = 0;
          for (std::size_t i = 0; i < raw.rows(); ++i)
            for (std::size_t j = 0; j < rank; ++j) {
              raw(i, j) = cplx(p[ix], p[ix + 1]);
              ix += 2;
            }
          try {
            const ComplexMatrix v = orthonormalized_columns(raw);
            const Channel ch = channel_from_isometry(v, ref_layout, prime_layout, env);
            best_gap = g;
            best_ext = apply_channel(ch, phi_density);
            best_pairs = pairs;
          } catch (const Error&) {
          }
        }
      }
    }
  }

  if (!best_ext) throw OptimizerFailure("no extension family applicable");
  CemiSearchResult out;
  out.value = std::max(0.0, 0.5 * best_gap);
  out.extension = std::move(*best_ext);
  out.pairs = std::move(best_pairs);
  return out;
}

double geometric_cemi_upper(const DensityMatrix& rho,
                            const std::vector<std::vector<std::string>>& parts,
                            const std::vector<std::size_t>& ext_dims,
                            const OptimizerConfig& cfg, const ToleranceProfile& tol) {
  const CemiSearchResult search = cemi_upper_bound_search(rho, parts, ext_dims, cfg, tol);

  // Best local recoveries on the found extension, mask all-ones; reuse the
  // coordinate grid and keep the best fidelity.
  const DensityMatrix& ext = search.extension;
  std::vector<std::string> primes_all;
  for (const PartyPair& p : search.pairs)
    primes_all.insert(primes_all.end(), p.prime.begin(), p.prime.end());
  const DensityMatrix primes_state = partial_trace(ext, primes_all);

  const std::vector<double> grid = petz_t_grid();
  double best_f = 0.0;
  std::vector<std::size_t> t_ix(search.pairs.size(), 20);
  const auto fid_for = [&](const std::vector<std::size_t>& ix) {
    DensityMatrix state = primes_state;
    for (std::size_t i = 0; i < search.pairs.size(); ++i) {
      std::vector<std::string> pair_labels = search.pairs[i].a;
      pair_labels.insert(pair_labels.end(), search.pairs[i].prime.begin(),
                         search.pairs[i].prime.end());
      const DensityMatrix marginal = partial_trace(ext, pair_labels);
      state = apply_channel(
          petz_recovery(marginal, search.pairs[i].prime, grid[ix[i]], tol), state);
    }
    return fidelity(ext, state, tol);
  };
  best_f = fid_for(t_ix);
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t i = 0; i < search.pairs.size(); ++i)
      for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        std::vector<std::size_t> trial = t_ix;
        trial[i] = gi;
        const double f = fid_for(trial);
        if (f > best_f + 1e-15) {
          best_f = f;
          t_ix = trial;
        }
      }

  return std::max(0.0, -0.5 * std::log(std::max(best_f, 1e-300)));
}

// ---------------------------------------------------------------------------
// Dykstra k-extendibility
// ---------------------------------------------------------------------------

std::string to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::Feasible: return "Feasible";
    case FeasibilityStatus::InfeasibleEvidence: return "InfeasibleEvidence";
    case FeasibilityStatus::Undecided: return "Undecided";
  }
  return "Undecided";
}

namespace {

struct ExtendibilityProblem {
  SystemLayout layout;                 // original systems + trailing copies
  std::size_t base_dim = 0;            // rho dimension
  std::size_t env_dim = 0;             // product of copy dimensions
  std::vector<std::vector<std::size_t>> perm_sigmas;  // index maps, all groups

  // Orthogonal projection onto the permutation-invariant subspace.
  ComplexMatrix symmetrize(const ComplexMatrix& x) const {
    if (perm_sigmas.empty()) return x;
    ComplexMatrix acc(x.rows(), x.cols());
    for (const std::vector<std::size_t>& sigma : perm_sigmas) {
      for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
          acc(sigma[i], sigma[j]) += x(i, j);
    }
    acc *= cplx(1.0 / static_cast<double>(perm_sigmas.size()), 0.0);
    return acc;
  }

  ComplexMatrix marginal(const ComplexMatrix& x) const {
    ComplexMatrix out(base_dim, base_dim);
    for (std::size_t i = 0; i < base_dim; ++i)
      for (std::size_t j = 0; j < base_dim; ++j) {
        cplx s = 0.0;
        for (std::size_t e = 0; e < env_dim; ++e)
          s += x(i * env_dim + e, j * env_dim + e);
        out(i, j) = s;
      }
    return out;
  }

  ComplexMatrix project_marginal(const ComplexMatrix& x,
                                 const ComplexMatrix& rho) const {
    ComplexMatrix delta = rho - marginal(x);
    delta *= cplx(1.0 / static_cast<double>(env_dim), 0.0);
    ComplexMatrix out = x;
    for (std::size_t i = 0; i < base_dim; ++i)
      for (std::size_t j = 0; j < base_dim; ++j) {
        const cplx d = delta(i, j);
        if (d == cplx(0.0, 0.0)) continue;
        for (std::size_t e = 0; e < env_dim; ++e)
          out(i * env_dim + e, j * env_dim + e) += d;
      }
    return out;
  }

  static ComplexMatrix project_psd(const ComplexMatrix& x) {
    const HermitianEig eig = hermitian_eig(x.symmetrized(), 1e-6);
    const std::size_t n = x.rows();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      if (eig.eigenvalues[k] <= 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const cplx vik = eig.eigenvectors(i, k) * eig.eigenvalues[k];
        for (std::size_t j = 0; j < n; ++j)
          out(i, j) += vik * std::conj(eig.eigenvectors(j, k));
      }
    }
    return out;
  }
};

// All permutations of k block labels as full-index maps, combined across
// groups (the product group average equals sequential group averages; we
// enumerate per group and compose sequentially into a flat list by applying
// groups one after another).
std::vector<std::vector<std::size_t>> group_permutation_sigmas(
    const SystemLayout& layout, const std::vector<std::vector<std::vector<std::string>>>& groups) {
  // Start with the identity.
  std::vector<std::vector<std::size_t>> sigmas;
  std::vector<std::size_t> ident(layout.total_dim());
  std::iota(ident.begin(), ident.end(), 0);
  sigmas.push_back(ident);

  for (const auto& blocks : groups) {
    const std::size_t k = blocks.size();
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::vector<std::size_t>> group_sigmas;
    do {
      // label map: block b -> block idx[b]
      std::vector<std::size_t> dest(layout.size());
      std::iota(dest.begin(), dest.end(), 0);
      for (std::size_t b = 0; b < k; ++b)
        for (std::size_t m = 0; m < blocks[b].size(); ++m)
          dest[layout.position(blocks[b][m])] = layout.position(blocks[idx[b]][m]);
      std::vector<std::size_t> sigma(layout.total_dim());
      for (std::size_t i = 0; i < layout.total_dim(); ++i) {
        const std::vector<std::size_t> d = layout.digits_of(i);
        std::vector<std::size_t> nd(d.size());
        for (std::size_t p = 0; p < d.size(); ++p) nd[dest[p]] = d[p];
        sigma[i] = layout.index_of(nd);
      }
      group_sigmas.push_back(std::move(sigma));
    } while (std::next_permutation(idx.begin(), idx.end()));

    // Compose with what we have (product group).
    std::vector<std::vector<std::size_t>> combined;
    combined.reserve(sigmas.size() * group_sigmas.size());
    for (const auto& a : sigmas)
      for (const auto& g : group_sigmas) {
        std::vector<std::size_t> c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = g[a[i]];
        combined.push_back(std::move(c));
      }
    sigmas = std::move(combined);
  }
  return sigmas;
}

}  // namespace

FeasibilityCertificate dykstra_k_extendibility(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts_to_extend,
    std::size_t k, const OptimizerConfig& cfg, const ToleranceProfile& tol) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (k > 6) throw DimensionGuard("k > 6 refused");

  // Extended layout: original subsystems, then copies 2..k of each group
  // appended in order.
  std::vector<Subsystem> subs = rho.layout().subsystems();
  std::vector<std::vector<std::vector<std::string>>> groups;  // [group][block][labels]
  std::vector<std::vector<std::string>> cert_groups;
  for (const auto& g : parts_to_extend) {
    if (g.empty()) throw NotAPartition("empty extension group");
    std::vector<std::vector<std::string>> blocks;
    blocks.push_back(g);
    std::vector<std::string> flat = g;
    for (std::size_t c = 2; c <= k; ++c) {
      std::vector<std::string> copy;
      for (const std::string& l : g) {
        const std::string cl = l + "#" + std::to_string(c);
        subs.push_back({cl, rho.layout().dim_of(l)});
        copy.push_back(cl);
        flat.push_back(cl);
      }
      blocks.push_back(std::move(copy));
    }
    groups.push_back(std::move(blocks));
    cert_groups.push_back(std::move(flat));
  }
  SystemLayout ext_layout{subs};
  if (ext_layout.total_dim() > cfg.dimension_cap)
    throw DimensionGuard("extension dimension " +
                         std::to_string(ext_layout.total_dim()) + " exceeds cap " +
                         std::to_string(cfg.dimension_cap));

  ExtendibilityProblem prob;
  prob.layout = ext_layout;
  prob.base_dim = rho.dim();
  prob.env_dim = ext_layout.total_dim() / rho.dim();
  prob.perm_sigmas = group_permutation_sigmas(ext_layout, groups);

  const ComplexMatrix& target = rho.matrix();
  const std::size_t n = ext_layout.total_dim();

  const auto residual_of = [&](const ComplexMatrix& x) {
    const double marg_err = (prob.marginal(x) - target).max_abs();
    const double sym_err = (x - prob.symmetrize(x)).max_abs();
    double min_eig = 0.0;
    const std::vector<double> evs = hermitian_eigenvalues(x.symmetrized(), 1e-5);
    if (!evs.empty()) min_eig = evs.front();
    return std::max({marg_err, sym_err, std::max(0.0, -min_eig)});
  };

  FeasibilityCertificate best;
  best.status = FeasibilityStatus::Undecided;
  best.residual = kInf;
  best.witness_layout = ext_layout;
  best.k = k;
  best.extended_parts = parts_to_extend;
  best.groups = cert_groups;

  const std::size_t restarts = std::max<std::size_t>(1, std::min<std::size_t>(cfg.restarts, 3));
  const std::size_t max_iters = std::max<std::size_t>(cfg.max_iters * 50, 20000);
  std::size_t plateaus = 0;

  for (std::size_t restart = 0; restart < restarts; ++restart) {
    // Start from rho (x) product of copy marginals, optionally noised.
    ComplexMatrix x(n, n);
    {
      ComplexMatrix env(prob.env_dim, prob.env_dim);
      // product of group-copy marginals
      ComplexMatrix acc = ComplexMatrix::identity(1);
      for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const DensityMatrix m = partial_trace(rho, parts_to_extend[gi]);
        for (std::size_t c = 2; c <= k; ++c) acc = kron(acc, m.matrix());
      }
      env = acc;
      x = kron(target, env);
      if (restart > 0) {
        CounterRng rng = CounterRng(cfg.seed).derive(restart);
        ComplexMatrix noise = random_ginibre(n, n, rng);
        noise = noise * noise.adjoint();
        noise *= cplx(0.05 / std::max(1.0, noise.trace().real()), 0.0);
        x += noise;
        // restore the exact marginal after noising
        x = prob.project_marginal(x, target);
      }
    }

    // Aim an order below the certification tolerance: the final witness
    // cleanup (symmetrize, clamp, renormalize) costs a little accuracy.
    const double loop_target = 0.1 * cfg.tol;
    ComplexMatrix p_sym(n, n), p_marg(n, n), p_psd(n, n);
    double res = residual_of(x);
    double res_old = res;
    std::size_t it = 0;
    bool plateau = false;
    for (; it < max_iters && res > loop_target; ++it) {
      ComplexMatrix y = prob.symmetrize(x + p_sym);
      p_sym = (x + p_sym) - y;
      x = y;

      y = prob.project_marginal(x + p_marg, target);
      p_marg = (x + p_marg) - y;
      x = y;

      y = ExtendibilityProblem::project_psd(x + p_psd);
      p_psd = (x + p_psd) - y;
      x = std::move(y);

      if ((it + 1) % 25 == 0) {
        res = residual_of(x);
        if ((it + 1) % 500 == 0) {
          if (res > loop_target && res_old - res < 1e-3 * res_old) {
            plateau = true;
            break;
          }
          res_old = res;
        }
      }
    }
    res = residual_of(x);

    // Witness cleanup keeps symmetry and positivity exact and measures the
    // remaining marginal error.
    ComplexMatrix w = ExtendibilityProblem::project_psd(prob.symmetrize(x));
    const double tr = w.trace().real();
    if (tr > 1e-12) w *= cplx(1.0 / tr, 0.0);
    const double witness_res = (prob.marginal(w) - target).max_abs();

    if (witness_res <= cfg.tol) {
      FeasibilityCertificate cert;
      cert.status = FeasibilityStatus::Feasible;
      cert.iterations = it;
      cert.residual = witness_res;
      cert.witness = DensityMatrix::trusted(ext_layout, w.symmetrized());
      cert.witness_layout = ext_layout;
      cert.k = k;
      cert.extended_parts = parts_to_extend;
      cert.groups = cert_groups;
      return cert;
    }
    if (plateau) ++plateaus;
    if (res < best.residual) {
      best.residual = res;
      best.iterations = it;
    }
  }

  best.status = (plateaus == restarts) ? FeasibilityStatus::InfeasibleEvidence
                                       : FeasibilityStatus::Undecided;
  return best;
}

// ---------------------------------------------------------------------------
// Separable distance witness (Frank-Wolfe)
// ---------------------------------------------------------------------------

SeparableWitness separable_distance_witness(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const OptimizerConfig& cfg, const ToleranceProfile& tol) {
  PartBlocks blocks = make_blocks(rho, parts, true);
  const DensityMatrix& work = blocks.state;
  const BlockIndex idx(blocks.dims);
  const std::size_t n = work.dim();
  const std::size_t l = blocks.dims.size();
  CounterRng root(cfg.seed);

  struct Atom {
    std::vector<std::vector<cplx>> factors;  // one unit vector per part
    std::vector<cplx> full;
  };

  const auto assemble_full = [&](const std::vector<std::vector<cplx>>& factors) {
    std::vector<cplx> x(n, 1.0);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t j = 0; j < l; ++j) x[u] *= factors[j][idx.digit(u, j)];
    return x;
  };

  // Alternating per-part extremization of <prod| m |prod>.
  const auto alternate = [&](const ComplexMatrix& m,
                             std::vector<std::vector<cplx>> vecs, int rounds,
                             bool maximize) {
    for (int round = 0; round < rounds; ++round) {
      for (std::size_t i = 0; i < l; ++i) {
        const std::size_t d = blocks.dims[i];
        ComplexMatrix contracted(d, d);
        for (std::size_t u = 0; u < n; ++u) {
          for (std::size_t v = 0; v < n; ++v) {
            const cplx muv = m(u, v);
            if (muv == cplx(0.0, 0.0)) continue;
            cplx coeff = muv;
            for (std::size_t j = 0; j < l && coeff != cplx(0.0, 0.0); ++j) {
              if (j == i) continue;
              coeff *= std::conj(vecs[j][idx.digit(u, j)]) * vecs[j][idx.digit(v, j)];
            }
            if (coeff != cplx(0.0, 0.0))
              contracted(idx.digit(u, i), idx.digit(v, i)) += coeff;
          }
        }
        const HermitianEig eig = hermitian_eig(contracted.symmetrized(), 1e-6);
        const std::size_t col = maximize ? d - 1 : 0;
        for (std::size_t r = 0; r < d; ++r) vecs[i][r] = eig.eigenvectors(r, col);
      }
    }
    return vecs;
  };

  const auto quad_form = [&](const ComplexMatrix& m, const std::vector<cplx>& x) {
    double val = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      cplx acc = 0.0;
      for (std::size_t v = 0; v < n; ++v) acc += m(u, v) * x[v];
      val += std::real(std::conj(x[u]) * acc);
    }
    return val;
  };

  // Linear minimization oracle over product pure states.
  const auto lmo = [&](const ComplexMatrix& g, CounterRng& rng) {
    Atom best;
    double best_val = kInf;
    for (int init = 0; init < 2; ++init) {
      std::vector<std::vector<cplx>> vecs;
      for (std::size_t i = 0; i < l; ++i)
        vecs.push_back(random_unit_vector(blocks.dims[i], rng));
      vecs = alternate(g, std::move(vecs), 6, /*maximize=*/false);
      const std::vector<cplx> full = assemble_full(vecs);
      const double val = quad_form(g, full);
      if (val < best_val) {
        best_val = val;
        best = Atom{std::move(vecs), full};
      }
    }
    return best;
  };

  std::vector<Atom> atoms;
  std::vector<double> weights;
  std::vector<std::vector<double>> gram;  // |<a_i|a_j>|^2
  std::vector<double> lin;                // <a_i| rho |a_i>

  const auto refresh_atom_row = [&](std::size_t i) {
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const double overlap = std::norm(inner(atoms[i].full, atoms[j].full));
      gram[i][j] = overlap;
      gram[j][i] = overlap;
    }
    lin[i] = quad_form(work.matrix(), atoms[i].full);
  };

  const auto add_atom = [&](Atom atom) {
    const std::size_t m = atoms.size();
    for (std::size_t i = 0; i < m; ++i) gram[i].push_back(0.0);
    gram.emplace_back(m + 1, 0.0);
    atoms.push_back(std::move(atom));
    weights.push_back(0.0);
    lin.push_back(0.0);
    refresh_atom_row(m);
  };

  // Exact pairwise weight exchanges on the simplex (closed form for the
  // quadratic objective).
  const auto refit_weights = [&]() {
    const std::size_t m = atoms.size();
    if (m == 0) return;
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0)
      weights.assign(m, 1.0 / static_cast<double>(m));
    else
      for (double& w : weights) w /= total;

    std::vector<double> q(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) q[i] += gram[i][j] * weights[j];

    for (int sweep = 0; sweep < 12; ++sweep) {
      double moved = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          const double curv = gram[i][i] - 2.0 * gram[i][j] + gram[j][j];
          if (curv < 1e-15) continue;
          double delta = ((lin[i] - q[i]) - (lin[j] - q[j])) / curv;
          delta = std::clamp(delta, -weights[i], weights[j]);
          if (std::abs(delta) < 1e-15) continue;
          weights[i] += delta;
          weights[j] -= delta;
          for (std::size_t k = 0; k < m; ++k)
            q[k] += delta * (gram[k][i] - gram[k][j]);
          moved += std::abs(delta);
        }
      }
      if (moved < 1e-13) break;
    }
  };

  const auto drop_idle_atoms = [&]() {
    std::size_t keep = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (weights[i] < 1e-12) continue;
      if (keep != i) {
        atoms[keep] = std::move(atoms[i]);
        weights[keep] = weights[i];
      }
      ++keep;
    }
    if (keep == 0 || keep == atoms.size()) return;
    atoms.resize(keep);
    weights.resize(keep);
    lin.assign(keep, 0.0);
    gram.assign(keep, std::vector<double>(keep, 0.0));
    for (std::size_t i = 0; i < keep; ++i) refresh_atom_row(i);
  };

  const auto rebuild_omega = [&]() {
    ComplexMatrix acc(n, n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (weights[k] < 1e-14) continue;
      const cplx w(weights[k], 0.0);
      for (std::size_t u = 0; u < n; ++u) {
        const cplx wu = w * atoms[k].full[u];
        for (std::size_t v = 0; v < n; ++v)
          acc(u, v) += wu * std::conj(atoms[k].full[v]);
      }
    }
    return acc;
  };

  // Seesaw polish: re-extremize each atom against its own residual
  // R_k = rho - sum_{j != k} w_j A_j, warm-started from the current factors.
  // The running mixture is updated in place as atoms move.
  const auto polish_atoms = [&](ComplexMatrix& omega) {
    const auto rank_one_update = [&](const std::vector<cplx>& x, double scale) {
      const cplx w(scale, 0.0);
      for (std::size_t u = 0; u < n; ++u) {
        const cplx wu = w * x[u];
        for (std::size_t v = 0; v < n; ++v) omega(u, v) += wu * std::conj(x[v]);
      }
    };
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (weights[k] < 1e-10) continue;
      rank_one_update(atoms[k].full, -weights[k]);
      ComplexMatrix residual = work.matrix() - omega;
      std::vector<std::vector<cplx>> vecs =
          alternate(residual.symmetrized(), atoms[k].factors, 2, /*maximize=*/true);
      Atom refined{vecs, assemble_full(vecs)};
      atoms[k] = std::move(refined);
      rank_one_update(atoms[k].full, weights[k]);
      refresh_atom_row(k);
    }
  };

  // Start from the product of marginals as a baseline candidate.
  ComplexMatrix omega = [&] {
    std::vector<ComplexMatrix> ms;
    for (std::size_t i = 0; i < l; ++i)
      ms.push_back(partial_trace(work, blocks.labels[i]).matrix());
    return kron_all(ms);
  }();

  double best_ub = kInf;
  ComplexMatrix best_witness = omega;
  const auto consider = [&](const ComplexMatrix& cand) {
    const double td = trace_norm(work.matrix() - cand);
    if (td < best_ub) {
      best_ub = td;
      best_witness = cand;
    }
  };
  consider(omega);
  omega = ComplexMatrix(n, n);  // atom hull starts empty

  CounterRng rng = root.derive(31);
  const std::size_t iters = std::max<std::size_t>(cfg.max_iters / 4, 60);
  for (std::size_t iter = 0; iter < iters; ++iter) {
    const ComplexMatrix g = cplx(2.0, 0.0) * (omega - work.matrix());
    add_atom(lmo(g, rng));
    refit_weights();
    omega = rebuild_omega();
    for (int pass = 0; pass < 5; ++pass) {
      polish_atoms(omega);
      refit_weights();
      omega = rebuild_omega();
    }
    drop_idle_atoms();
    omega = rebuild_omega();
    consider(omega);
    if (best_ub < 1e-7) break;
  }

  SeparableWitness out;
  out.ub = best_ub;
  DensityMatrix witness =
      DensityMatrix::trusted(work.layout(), best_witness.symmetrized());
  out.witness = witness.reordered(rho.layout().labels());
  return out;
}

}  // namespace qcorr
