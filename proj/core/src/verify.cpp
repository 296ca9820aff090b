#include "qcorr/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "qcorr/eig.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/states_library.hpp"
#include "qcorr/tensor_ops.hpp"

namespace qcorr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sanitize(double x) {
  if (std::isnan(x)) return -1e308;
  if (x > 1e308) return 1e308;
  if (x < -1e308) return -1e308;
  return x;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

std::size_t param_or(const std::map<std::string, std::string>& p,
                     const std::string& key, std::size_t fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : std::stoul(it->second);
}

struct PairsInstance {
  DensityMatrix rho;
  std::vector<PartyPair> pairs;
};

SystemLayout pairs_layout(std::size_t l, std::size_t da, std::size_t dp) {
  std::vector<Subsystem> subs;
  for (std::size_t i = 1; i <= l; ++i) {
    subs.push_back({"A" + std::to_string(i), da});
    subs.push_back({"P" + std::to_string(i), dp});
  }
  return SystemLayout(std::move(subs));
}

std::vector<PartyPair> pairs_for(std::size_t l) {
  std::vector<PartyPair> pairs;
  for (std::size_t i = 1; i <= l; ++i)
    pairs.push_back(PartyPair{{"A" + std::to_string(i)}, {"P" + std::to_string(i)}});
  return pairs;
}

std::vector<double> random_simplex(std::size_t n, CounterRng& rng) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log(rng.next_double_open_low());
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

PairsInstance draw_pairs_instance(const ParsedUri& ens, CounterRng& rng) {
  const std::size_t l = param_or(ens.params, "l", 2);
  const std::size_t da = param_or(ens.params, "da", 2);
  const std::size_t dp = param_or(ens.params, "dp", 2);
  SystemLayout layout = pairs_layout(l, da, dp);
  const std::size_t env = param_or(ens.params, "env", 0);

  PairsInstance out;
  out.pairs = pairs_for(l);
  if (ens.name == "classicalpairs") {
    out.rho = classical_state(random_simplex(layout.total_dim(), rng), layout);
  } else if (ens.name == "purepairs") {
    out.rho = random_pure_state(layout, rng).density();
  } else if (ens.name == "flagext") {
    const std::size_t terms = param_or(ens.params, "terms", 3);
    std::vector<double> weights = random_simplex(terms, rng);
    std::vector<std::vector<DensityMatrix>> factors(terms);
    std::vector<std::string> flags;
    for (std::size_t i = 1; i <= l; ++i) flags.push_back("P" + std::to_string(i));
    for (std::size_t z = 0; z < terms; ++z)
      for (std::size_t i = 1; i <= l; ++i)
        factors[z].push_back(
            random_pure_state(SystemLayout::single("A" + std::to_string(i), da), rng)
                .density());
    out.rho = flag_extension(weights, factors, flags);
  } else {
    out.rho = random_density(layout, env, rng);
  }
  return out;
}

DensityMatrix draw_separable(std::size_t l, std::size_t d, std::size_t terms,
                             CounterRng& rng) {
  std::vector<double> weights = random_simplex(terms, rng);
  std::vector<std::vector<DensityMatrix>> factors(terms);
  for (std::size_t z = 0; z < terms; ++z)
    for (std::size_t i = 1; i <= l; ++i)
      factors[z].push_back(
          random_pure_state(SystemLayout::single("A" + std::to_string(i), d), rng)
              .density());
  DensityMatrix sep = separable_state(weights, factors);
  // A maximally mixed component keeps the draw full rank (still separable).
  const double gamma = 0.02 + 0.03 * rng.next_double();
  ComplexMatrix m = sep.matrix();
  m *= cplx(1.0 - gamma, 0.0);
  for (std::size_t i = 0; i < sep.dim(); ++i)
    m(i, i) += gamma / static_cast<double>(sep.dim());
  return DensityMatrix::trusted(sep.layout(), std::move(m));
}

// ---------------------------------------------------------------------------
// Shared recovery search: coordinate descent over per-party rotated-Petz
// parameters of the product recovery applied to the primes marginal.
// ---------------------------------------------------------------------------

struct PetzProductSearch {
  PetzProductSearch(const DensityMatrix& rho_in, const std::vector<PartyPair>& pairs_in,
                    const ToleranceProfile& tol_in)
      : rho(rho_in), pairs(pairs_in), tol(tol_in) {}

  const DensityMatrix& rho;
  const std::vector<PartyPair>& pairs;
  const ToleranceProfile& tol;
  std::vector<double> grid = petz_t_grid();
  std::map<std::pair<std::size_t, std::size_t>, Channel> cache;

  const Channel& channel_at(std::size_t party, std::size_t gi) {
    const auto key = std::make_pair(party, gi);
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::vector<std::string> labels = pairs[party].a;
      labels.insert(labels.end(), pairs[party].prime.begin(), pairs[party].prime.end());
      it = cache
               .emplace(key, petz_recovery(partial_trace(rho, labels),
                                           pairs[party].prime, grid[gi], tol))
               .first;
    }
    return it->second;
  }

  DensityMatrix recovered(const std::vector<std::size_t>& t_ix,
                          const DensityMatrix& primes_state) {
    DensityMatrix state = primes_state;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      state = apply_channel(channel_at(i, t_ix[i]), state);
    return state;
  }

  // Maximizes `score` over the grid coordinatewise; returns the best score.
  double maximize(const std::function<double(const DensityMatrix&)>& score,
                  int passes, std::vector<std::size_t>* best_ix = nullptr) {
    std::vector<std::string> primes_all;
    for (const PartyPair& p : pairs)
      primes_all.insert(primes_all.end(), p.prime.begin(), p.prime.end());
    const DensityMatrix primes_state = partial_trace(rho, primes_all);

    std::vector<std::size_t> t_ix(pairs.size(), 20);  // t = 0
    double best = score(recovered(t_ix, primes_state));
    for (int pass = 0; pass < passes; ++pass) {
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
          if (gi == t_ix[i]) continue;
          std::vector<std::size_t> trial = t_ix;
          trial[i] = gi;
          const double v = score(recovered(trial, primes_state));
          if (v > best + 1e-15) {
            best = v;
            t_ix = trial;
          }
        }
      }
    }
    // Joint sweep for two parties when the coordinate pass may have stalled.
    if (pairs.size() == 2 && passes >= 3) {
      for (std::size_t g1 = 0; g1 < grid.size(); g1 += 2)
        for (std::size_t g2 = 0; g2 < grid.size(); g2 += 2) {
          const std::vector<std::size_t> trial{g1, g2};
          const double v = score(recovered(trial, primes_state));
          if (v > best + 1e-15) {
            best = v;
            t_ix = trial;
          }
        }
    }
    if (best_ix) *best_ix = t_ix;
    return best;
  }
};

VerificationReport base_report(const std::string& id, std::uint64_t seed,
                               std::size_t trial) {
  VerificationReport r;
  r.check_id = id;
  r.seed = seed;
  r.trial = trial;
  return r;
}

void finalize(VerificationReport& r, double lhs, double rhs, double tol_slack) {
  r.lhs = sanitize(lhs);
  r.rhs = sanitize(rhs);
  r.slack = sanitize(lhs - rhs);
  r.holds = (r.slack >= -tol_slack);
}

}  // namespace

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

const std::vector<CheckInfo>& known_checks() {
  static const std::vector<CheckInfo> checks = {
      {"fr", CheckTier::Existential, "random:tri?da=2&db=2&dc=2",
       "I(A;B|C) >= max(-ln F, 1/4 ||rho - R(rho_BC)||_1^2), best-found recovery"},
      {"local-rec", CheckTier::Existential, "random:pairs?l=2&da=2&dp=2",
       "gap >= [1/(2l) || rho - (R1 x..x Rl)(rho_primes) ||_1]^2"},
      {"remark2", CheckTier::Existential, "random:pairs?l=2&da=2&dp=2",
       "the 2^l masked local-recoverability inequalities (worst mask reported)"},
      {"esq-cemi", CheckTier::Theorem, "random:pairs?l=2&da=2&dp=2",
       "gap >= I(A_1:...:A_l | primes)"},
      {"prop1-fwd", CheckTier::Theorem, "random:ebfixed?l=2&d=2",
       "(l+1) h2(eps/2) + eps sum ln|A_i| >= best-found MSQ discord"},
      {"prop1-conv", CheckTier::Theorem, "random:state?dims=2,2",
       "2 l sqrt(eps) >= || rho - EB(rho) ||_1 for the proof's EB channels"},
      {"definetti", CheckTier::Existential, "random:separable?l=2&d=2&terms=3&k=2",
       "(2/k) sum_ext |A_i|^2 >= separable-distance witness (or undecided)"},
      {"conjecture", CheckTier::Existential, "random:pairs?l=2&da=2&dp=2",
       "gap >= -ln F with product recoveries (open question; candidates flagged)"},
      {"prop4-n1", CheckTier::Existential, "random:pairs?l=2&da=2&dp=2",
       "gap >= min D(rho || (R1 x..x Rl)(rho_primes)) at n = 1 (exploratory)"},
      {"monotone", CheckTier::Theorem, "random:pairs?l=3&da=2&dp=2",
       "I(A_1 A_1' : ... ) >= I(A_1' : ...)"},
      {"lemma1", CheckTier::Theorem, "random:pairs?l=3&da=2&dp=2",
       "gap equals its chain expansion for every order; every term >= 0"},
      {"dimension-bound", CheckTier::Theorem, "random:pairs?l=3&da=2&dp=2",
       "I(C_1:...:C_l) + 2 sum ln|D_i| >= I(C_1 D_1:...:C_l D_l)"},
      {"fannes", CheckTier::Theorem, "random:statepair?dims=2,2",
       "T ln(d-1) + h2(T) >= |H(rho) - H(sigma)|"},
  };
  return checks;
}

const CheckInfo& check_info(const std::string& id) {
  for (const CheckInfo& c : known_checks())
    if (c.id == id) return c;
  throw UnknownCheck("'" + id + "'");
}

// ---------------------------------------------------------------------------
// Single-instance checkers
// ---------------------------------------------------------------------------

VerificationReport check_fawzi_renner(const DensityMatrix& rho,
                                      const std::vector<std::string>& a,
                                      const std::vector<std::string>& b,
                                      const std::vector<std::string>& c,
                                      const OptimizerConfig& cfg,
                                      const ToleranceProfile& tol) {
  Stopwatch clock;
  VerificationReport r = base_report("fr", cfg.seed, 0);
  const double cmi = conditional_mutual_information(rho, a, b, c, tol);
  const RecoveryResult rec = optimize_recovery(rho, a, c, cfg, tol);

  std::vector<std::string> keep;
  std::set<std::string> lost(a.begin(), a.end());
  for (const std::string& l : rho.layout().labels())
    if (!lost.count(l)) keep.push_back(l);
  const DensityMatrix recovered = apply_channel(rec.channel, partial_trace(rho, keep));
  const double dist = trace_distance(rho, recovered);
  const double rhs = std::max(-std::log(std::max(rec.fid, 1e-300)),
                              0.25 * dist * dist);

  finalize(r, cmi, rhs, tol.inequality_slack);
  r.instance = "fidelity=" + std::to_string(rec.fid) + " t=" + std::to_string(rec.t) +
               " dist=" + std::to_string(dist);
  r.elapsed_seconds = clock.seconds();
  return r;
}

VerificationReport check_local_recoverability(const DensityMatrix& rho,
                                              const std::vector<PartyPair>& pairs,
                                              const OptimizerConfig& cfg,
                                              const ToleranceProfile& tol) {
  Stopwatch clock;
  VerificationReport r = base_report("local-rec", cfg.seed, 0);
  const LocalRecoverySuite suite =
      local_recovery_suite(rho, pairs, std::vector<bool>(pairs.size(), true), cfg, tol);
  finalize(r, suite.lhs, suite.rhs, tol.inequality_slack);
  r.instance = "dist=" + std::to_string(suite.dist);
  r.elapsed_seconds = clock.seconds();
  return r;
}

std::vector<VerificationReport> check_remark2_family(const DensityMatrix& rho,
                                                     const std::vector<PartyPair>& pairs,
                                                     const OptimizerConfig& cfg,
                                                     const ToleranceProfile& tol) {
  const std::size_t l = pairs.size();
  std::vector<VerificationReport> out;
  for (std::size_t bits = 0; bits < (std::size_t(1) << l); ++bits) {
    Stopwatch clock;
    std::vector<bool> mask(l);
    std::string mask_str;
    for (std::size_t i = 0; i < l; ++i) {
      mask[i] = (bits >> i) & 1;
      mask_str += mask[i] ? '1' : '0';
    }
    VerificationReport r = base_report("remark2", cfg.seed, bits);
    const LocalRecoverySuite suite = local_recovery_suite(rho, pairs, mask, cfg, tol);
    finalize(r, suite.lhs, suite.rhs, tol.inequality_slack);
    r.instance = "mask=" + mask_str + " dist=" + std::to_string(suite.dist);
    r.elapsed_seconds = clock.seconds();
    out.push_back(std::move(r));
  }
  return out;
}

VerificationReport check_esq_le_cemi(const DensityMatrix& rho_ext,
                                     const std::vector<PartyPair>& pairs,
                                     const ToleranceProfile& tol) {
  Stopwatch clock;
  VerificationReport r = base_report("esq-cemi", 0, 0);
  std::vector<std::vector<std::string>> a_parts;
  std::vector<std::string> primes_all;
  for (const PartyPair& p : pairs) {
    a_parts.push_back(p.a);
    primes_all.insert(primes_all.end(), p.prime.begin(), p.prime.end());
  }
  const double lhs = gap(rho_ext, pairs, tol);
  const double rhs =
      conditional_multipartite_information(rho_ext, a_parts, primes_all, tol);
  finalize(r, lhs, rhs, tol.inequality_slack);
  r.elapsed_seconds = clock.seconds();
  return r;
}

VerificationReport check_prop1_forward(const DensityMatrix& rho,
                                       const std::vector<std::vector<std::string>>& parts,
                                       const std::vector<EbChannelSpec>& ebs,
                                       const OptimizerConfig& cfg,
                                       const ToleranceProfile& tol) {
  Stopwatch clock;
  if (ebs.size() != parts.size())
    throw ArityMismatch("one EB channel per party required");
  VerificationReport r = base_report("prop1-fwd", cfg.seed, 0);

  DensityMatrix mapped = rho;
  for (const EbChannelSpec& spec : ebs)
    mapped = apply_channel(eb_channel(spec.povm, spec.preps), mapped);
  const double eps = trace_distance(rho, mapped);

  std::vector<std::size_t> dims;
  for (const auto& p : parts) {
    std::size_t d = 1;
    for (const std::string& l : p) d *= rho.layout().dim_of(l);
    dims.push_back(d);
  }

  if (eps > 1.0) {
    // Outside the proposition's hypothesis; nothing to check.
    finalize(r, 0.0, 0.0, tol.inequality_slack);
    r.instance = "eps=" + std::to_string(eps) + " outside [0,1], vacuous";
    r.elapsed_seconds = clock.seconds();
    return r;
  }

  // Warm-start the measurement search with the channels' own POVM bases:
  // the proof's chain passes through exactly that measurement choice.
  std::vector<std::vector<ComplexMatrix>> warm;
  {
    std::vector<ComplexMatrix> bases;
    bool all_projective = true;
    for (std::size_t i = 0; i < ebs.size(); ++i) {
      const Povm& p = ebs[i].povm;
      if (p.outcomes() != p.dim()) {
        all_projective = false;
        break;
      }
      ComplexMatrix u(p.dim(), p.dim());
      for (std::size_t x = 0; x < p.outcomes(); ++x) {
        const HermitianEig eig = hermitian_eig(p.effects()[x], 1e-8);
        for (std::size_t row = 0; row < p.dim(); ++row)
          u(row, x) = eig.eigenvectors(row, p.dim() - 1);
      }
      bases.push_back(std::move(u));
    }
    if (all_projective) warm.push_back(std::move(bases));
  }

  const MsqDiscordResult discord = msq_discord(rho, parts, cfg, warm, tol);
  const double bound = msq_discord_upper_bound(eps, dims);
  finalize(r, bound, discord.value, tol.inequality_slack);
  r.instance = "eps=" + std::to_string(eps) +
               " discord_found=" + std::to_string(discord.value);
  r.elapsed_seconds = clock.seconds();
  return r;
}

VerificationReport check_prop1_converse(const DensityMatrix& rho,
                                        const std::vector<std::vector<std::string>>& parts,
                                        const OptimizerConfig& cfg,
                                        const ToleranceProfile& tol) {
  Stopwatch clock;
  VerificationReport r = base_report("prop1-conv", cfg.seed, 0);
  for (const auto& p : parts)
    if (p.size() != 1)
      throw ArityMismatch("prop1 converse needs single-label parties");

  const MsqDiscordResult discord = msq_discord(rho, parts, cfg, {}, tol);
  const double eps = std::max(discord.value, 0.0);
  const double l = static_cast<double>(parts.size());

  // omega: isometric extensions of the discord-optimal measurements.
  DensityMatrix omega = rho;
  std::vector<IsometricExtension> exts;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    IsometricExtension ext = isometric_extension(discord.best_povms[i]);
    omega = apply_channel(ext.as_channel(), omega);
    exts.push_back(std::move(ext));
  }

  // Local recoveries of E_i from X_i on omega, tuned for global fidelity.
  std::vector<PartyPair> rec_pairs;
  for (const IsometricExtension& e : exts)
    rec_pairs.push_back(PartyPair{{e.e_label}, {e.x_label}});
  PetzProductSearch search(omega, rec_pairs, tol);
  std::vector<std::size_t> t_ix;
  search.maximize(
      [&](const DensityMatrix& rec) { return fidelity(omega, rec, tol); }, 2, &t_ix);

  // EB channels E_i = (T_i o R_i) o M_i per the proof.
  DensityMatrix mapped = rho;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Channel measurement = measurement_channel(discord.best_povms[i]);
    const Channel recovery = search.channel_at(i, t_ix[i]);
    const Channel reversal = reversal_map(exts[i]);
    const Channel prep = compose(reversal, recovery);
    mapped = apply_channel(compose(prep, measurement), mapped);
  }
  const double dist = trace_distance(rho, mapped);
  finalize(r, 2.0 * l * std::sqrt(eps), dist, tol.inequality_slack);
  r.instance = "eps=" + std::to_string(eps) + " dist=" + std::to_string(dist);
  r.elapsed_seconds = clock.seconds();
  return r;
}

VerificationReport check_definetti(const FeasibilityCertificate& cert,
                                   const OptimizerConfig& cfg,
                                   const ToleranceProfile& tol) {
  Stopwatch clock;
  VerificationReport r = base_report("definetti", cfg.seed, 0);
  if (!cert.witness) throw MissingWitness("certificate has no witness extension");

  // The original state is the witness marginal on the unextended labels
  // plus the first copy of every extended block.
  std::set<std::string> copies;
  for (const auto& flat : cert.groups)
    for (const std::string& l : flat)
      if (l.find('#') != std::string::npos) copies.insert(l);
  std::vector<std::string> keep;
  for (const std::string& l : cert.witness_layout.labels())
    if (!copies.count(l)) keep.push_back(l);
  const DensityMatrix rho_raw = partial_trace(*cert.witness, keep);
  const DensityMatrix rho =
      DensityMatrix::validated(rho_raw.layout(), rho_raw.matrix(), tol);

  double sum_sq = 0.0;
  for (const auto& part : cert.extended_parts) {
    double d = 1.0;
    for (const std::string& l : part)
      d *= static_cast<double>(rho.layout().dim_of(l));
    sum_sq += d * d;
  }
  const double bound = (2.0 / static_cast<double>(cert.k)) * sum_sq;

  // Parts: unextended labels first, then each extended block.
  std::vector<std::vector<std::string>> parts;
  std::set<std::string> extended;
  for (const auto& part : cert.extended_parts)
    extended.insert(part.begin(), part.end());
  std::vector<std::string> first;
  for (const std::string& l : rho.layout().labels())
    if (!extended.count(l)) first.push_back(l);
  if (!first.empty()) parts.push_back(first);
  for (const auto& part : cert.extended_parts) parts.push_back(part);

  const SeparableWitness witness = separable_distance_witness(rho, parts, cfg, tol);
  finalize(r, bound, witness.ub, tol.inequality_slack);
  if (!r.holds)
    r.instance = "undecided: witness ub " + std::to_string(witness.ub) +
                 " exceeds bound " + std::to_string(bound) +
                 " (ub overestimates the distance)";
  else
    r.instance = "ub=" + std::to_string(witness.ub) + " k=" + std::to_string(cert.k);
  r.elapsed_seconds = clock.seconds();
  return r;
}

VerificationReport check_conjecture_instance(const DensityMatrix& rho,
                                             const std::vector<PartyPair>& pairs,
                                             const OptimizerConfig& cfg, double margin,
                                             const ToleranceProfile& tol) {
  Stopwatch clock;
  VerificationReport r = base_report("conjecture", cfg.seed, 0);
  const double lhs = gap(rho, pairs, tol);

  PetzProductSearch search(rho, pairs, tol);
  const auto score = [&](const DensityMatrix& rec) { return fidelity(rho, rec, tol); };
  double best_f = search.maximize(score, 2);
  double rhs = -std::log(std::max(best_f, 1e-300));

  bool candidate = (lhs - rhs < -margin);
  if (candidate) {
    // Tightened pass before calling it a candidate.
    best_f = std::max(best_f, search.maximize(score, 4));
    rhs = -std::log(std::max(best_f, 1e-300));
    candidate = (lhs - rhs < -margin);
  }
  finalize(r, lhs, rhs, margin);
  r.holds = !candidate;
  r.instance = candidate ? "candidate counterexample (survived re-verification)"
                         : "best F=" + std::to_string(best_f);
  r.elapsed_seconds = clock.seconds();
  return r;
}

VerificationReport check_prop4_single_letter(const DensityMatrix& rho_ext,
                                             const std::vector<PartyPair>& pairs,
                                             const OptimizerConfig& cfg,
                                             const ToleranceProfile& tol) {
  Stopwatch clock;
  VerificationReport r = base_report("prop4-n1", cfg.seed, 0);
  const double lhs = gap(rho_ext, pairs, tol);

  PetzProductSearch search(rho_ext, pairs, tol);
  const double best_neg_d = search.maximize(
      [&](const DensityMatrix& rec) {
        const double d = relative_entropy(rho_ext, rec, tol);
        return std::isinf(d) ? -1e308 : -d;
      },
      2);
  const double rhs = -best_neg_d;
  finalize(r, lhs, rhs, tol.inequality_slack);
  r.instance = "exploratory n=1 evaluation";
  r.elapsed_seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Campaign trials
// ---------------------------------------------------------------------------

namespace {

VerificationReport dispatch_trial(const std::string& check_id,
                                  const ParsedUri& ens, std::uint64_t campaign_seed,
                                  std::size_t trial, const OptimizerConfig& cfg,
                                  const ToleranceProfile& tol) {
  CounterRng rng = CounterRng(campaign_seed).derive(trial);
  OptimizerConfig trial_cfg = cfg;
  trial_cfg.seed = rng.derive(0xC0FFEE).next_u64();

  const auto attach_state = [&](VerificationReport& r, const DensityMatrix& rho) {
    if (!r.holds) r.witnesses["state"] = state_to_json(rho);
  };

  if (check_id == "lemma1") {
    Stopwatch clock;
    PairsInstance inst = draw_pairs_instance(ens, rng);
    VerificationReport r = base_report(check_id, campaign_seed, trial);
    const double g = gap(inst.rho, inst.pairs, tol);

    SubsetEntropies cache(inst.rho, tol);
    std::vector<std::size_t> order(inst.pairs.size());
    std::iota(order.begin(), order.end(), 0);
    double max_dev = 0.0;
    double min_term = kInf;
    do {
      const GapExpansion exp =
          chain_gap_expansion(inst.rho, inst.pairs, order, tol, &cache);
      max_dev = std::max(max_dev, std::abs(exp.total - g));
      for (const auto& [party, value] : exp.terms) min_term = std::min(min_term, value);
    } while (std::next_permutation(order.begin(), order.end()));

    const double defect = std::max(max_dev, std::max(0.0, -min_term));
    finalize(r, 0.0, defect, tol.inequality_slack);
    r.instance = "gap=" + std::to_string(g) + " max|chain-gap|=" +
                 std::to_string(max_dev) + " min_term=" + std::to_string(min_term);
    attach_state(r, inst.rho);
    r.elapsed_seconds = clock.seconds();
    return r;
  }
  if (check_id == "monotone") {
    Stopwatch clock;
    PairsInstance inst = draw_pairs_instance(ens, rng);
    VerificationReport r = base_report(check_id, campaign_seed, trial);
    std::vector<std::vector<std::string>> joined;
    std::vector<std::string> primes_all;
    for (const PartyPair& p : inst.pairs) {
      std::vector<std::string> j = p.a;
      j.insert(j.end(), p.prime.begin(), p.prime.end());
      joined.push_back(std::move(j));
      primes_all.insert(primes_all.end(), p.prime.begin(), p.prime.end());
    }
    const double lhs = multipartite_information(inst.rho, joined, tol);
    std::vector<std::vector<std::string>> primes_parts;
    for (const PartyPair& p : inst.pairs) primes_parts.push_back(p.prime);
    const double rhs = multipartite_information(partial_trace(inst.rho, primes_all),
                                                primes_parts, tol);
    finalize(r, lhs, rhs, tol.inequality_slack);
    attach_state(r, inst.rho);
    r.elapsed_seconds = clock.seconds();
    return r;
  }
  if (check_id == "dimension-bound") {
    Stopwatch clock;
    PairsInstance inst = draw_pairs_instance(ens, rng);
    VerificationReport r = base_report(check_id, campaign_seed, trial);
    std::vector<std::vector<std::string>> c_parts, d_parts;
    for (const PartyPair& p : inst.pairs) {
      c_parts.push_back(p.a);
      d_parts.push_back(p.prime);
    }
    const DimensionBoundSides sides =
        dimension_bound_check(inst.rho, c_parts, d_parts, tol);
    VerificationReport out = r;
    finalize(out, sides.rhs, sides.lhs, tol.inequality_slack);
    out.instance = "I(CD)=" + std::to_string(sides.lhs);
    attach_state(out, inst.rho);
    out.elapsed_seconds = clock.seconds();
    return out;
  }
  if (check_id == "fannes") {
    Stopwatch clock;
    const std::size_t d2 = param_or(ens.params, "dims", 0);
    SystemLayout layout =
        d2 ? SystemLayout::single("A", d2) : SystemLayout({{"A1", 2}, {"A2", 2}});
    VerificationReport r = base_report(check_id, campaign_seed, trial);
    const DensityMatrix sigma = random_density(layout, 0, rng);
    const DensityMatrix tau = random_density(layout, 0, rng);
    const double t = std::clamp(0.5 * trace_distance(sigma, tau), 0.0, 1.0);
    const double lhs = fannes_audenaert_bound(t, layout.total_dim());
    const double rhs =
        std::abs(von_neumann_entropy(sigma, tol) - von_neumann_entropy(tau, tol));
    finalize(r, lhs, rhs, tol.inequality_slack);
    r.instance = "T=" + std::to_string(t);
    r.elapsed_seconds = clock.seconds();
    return r;
  }
  if (check_id == "esq-cemi") {
    PairsInstance inst = draw_pairs_instance(ens, rng);
    VerificationReport r = check_esq_le_cemi(inst.rho, inst.pairs, tol);
    r.seed = campaign_seed;
    r.trial = trial;
    attach_state(r, inst.rho);
    return r;
  }
  if (check_id == "fr") {
    const std::size_t da = param_or(ens.params, "da", 2);
    const std::size_t db = param_or(ens.params, "db", 2);
    const std::size_t dc = param_or(ens.params, "dc", 2);
    SystemLayout layout({{"A", da}, {"B", db}, {"C", dc}});
    const DensityMatrix rho =
        random_density(layout, param_or(ens.params, "env", 0), rng);
    VerificationReport r = check_fawzi_renner(rho, {"A"}, {"B"}, {"C"}, trial_cfg, tol);
    r.seed = campaign_seed;
    r.trial = trial;
    attach_state(r, rho);
    return r;
  }
  if (check_id == "local-rec") {
    PairsInstance inst = draw_pairs_instance(ens, rng);
    VerificationReport r = check_local_recoverability(inst.rho, inst.pairs, trial_cfg, tol);
    r.seed = campaign_seed;
    r.trial = trial;
    attach_state(r, inst.rho);
    return r;
  }
  if (check_id == "remark2") {
    PairsInstance inst = draw_pairs_instance(ens, rng);
    std::vector<VerificationReport> family =
        check_remark2_family(inst.rho, inst.pairs, trial_cfg, tol);
    VerificationReport worst = family.front();
    for (const VerificationReport& f : family)
      if (f.slack < worst.slack) worst = f;
    worst.seed = campaign_seed;
    worst.trial = trial;
    attach_state(worst, inst.rho);
    return worst;
  }
  if (check_id == "prop1-fwd") {
    Stopwatch clock;
    const std::size_t l = param_or(ens.params, "l", 2);
    const std::size_t d = param_or(ens.params, "d", 2);
    std::vector<Subsystem> subs;
    for (std::size_t i = 1; i <= l; ++i) subs.push_back({"A" + std::to_string(i), d});
    SystemLayout layout{subs};
    std::vector<std::vector<std::string>> parts;
    for (std::size_t i = 1; i <= l; ++i) parts.push_back({"A" + std::to_string(i)});

    const DensityMatrix base = random_density(layout, 0, rng);
    std::vector<EbChannelSpec> ebs;
    for (std::size_t i = 1; i <= l; ++i) {
      const std::string label = "A" + std::to_string(i);
      const Povm povm = Povm::projective(label, random_unitary(d, rng));
      std::vector<DensityMatrix> preps;
      for (std::size_t x = 0; x < d; ++x)
        preps.push_back(random_density(SystemLayout::single(label, d), 0, rng));
      ebs.push_back(EbChannelSpec{povm, std::move(preps)});
    }
    DensityMatrix mapped = base;
    for (const EbChannelSpec& spec_i : ebs)
      mapped = apply_channel(eb_channel(spec_i.povm, spec_i.preps), mapped);

    const double weights[3] = {0.0, 0.01, 0.05};
    const double w = weights[trial % 3];
    DensityMatrix rho = mapped;
    if (w > 0.0) {
      const DensityMatrix noise = random_density(layout, 0, rng);
      ComplexMatrix m = rho.matrix();
      m *= cplx(1.0 - w, 0.0);
      ComplexMatrix nm = noise.matrix();
      nm *= cplx(w, 0.0);
      m += nm;
      rho = DensityMatrix::trusted(layout, std::move(m));
    }
    VerificationReport r = check_prop1_forward(rho, parts, ebs, trial_cfg, tol);
    r.seed = campaign_seed;
    r.trial = trial;
    r.instance += " w=" + std::to_string(w);
    attach_state(r, rho);
    r.elapsed_seconds = clock.seconds();
    return r;
  }
  if (check_id == "prop1-conv") {
    std::vector<std::size_t> dims{2, 2};
    if (ens.params.count("dims")) {
      dims.clear();
      std::string tok;
      std::stringstream ss(ens.params.at("dims"));
      while (std::getline(ss, tok, ',')) dims.push_back(std::stoul(tok));
    }
    std::vector<Subsystem> subs;
    std::vector<std::vector<std::string>> parts;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      subs.push_back({"A" + std::to_string(i + 1), dims[i]});
      parts.push_back({"A" + std::to_string(i + 1)});
    }
    SystemLayout layout{subs};
    const DensityMatrix rho = random_density(layout, 0, rng);
    VerificationReport r = check_prop1_converse(rho, parts, trial_cfg, tol);
    r.seed = campaign_seed;
    r.trial = trial;
    attach_state(r, rho);
    return r;
  }
  if (check_id == "definetti") {
    Stopwatch clock;
    const std::size_t l = param_or(ens.params, "l", 2);
    const std::size_t d = param_or(ens.params, "d", 2);
    const std::size_t terms = param_or(ens.params, "terms", 3);
    const std::size_t k = param_or(ens.params, "k", 2);
    const DensityMatrix rho = draw_separable(l, d, terms, rng);
    std::vector<std::vector<std::string>> to_extend;
    for (std::size_t i = 2; i <= l; ++i) to_extend.push_back({"A" + std::to_string(i)});
    OptimizerConfig dyk_cfg = trial_cfg;
    dyk_cfg.tol = std::max(trial_cfg.tol, 1e-6);
    const FeasibilityCertificate cert =
        dykstra_k_extendibility(rho, to_extend, k, dyk_cfg, tol);
    if (cert.status != FeasibilityStatus::Feasible) {
      VerificationReport r = base_report(check_id, campaign_seed, trial);
      finalize(r, 0.0, 1.0, tol.inequality_slack);
      r.instance = "separable input not certified Feasible (status " +
                   to_string(cert.status) + ", residual " +
                   std::to_string(cert.residual) + ")";
      attach_state(r, rho);
      r.elapsed_seconds = clock.seconds();
      return r;
    }
    VerificationReport r = check_definetti(cert, trial_cfg, tol);
    r.seed = campaign_seed;
    r.trial = trial;
    attach_state(r, rho);
    r.elapsed_seconds = clock.seconds();
    return r;
  }
  if (check_id == "conjecture") {
    PairsInstance inst = draw_pairs_instance(ens, rng);
    VerificationReport r = check_conjecture_instance(inst.rho, inst.pairs, trial_cfg,
                                                     1e-4, tol);
    r.seed = campaign_seed;
    r.trial = trial;
    attach_state(r, inst.rho);
    return r;
  }
  if (check_id == "prop4-n1") {
    PairsInstance inst = draw_pairs_instance(ens, rng);
    VerificationReport r = check_prop4_single_letter(inst.rho, inst.pairs, trial_cfg, tol);
    r.seed = campaign_seed;
    r.trial = trial;
    attach_state(r, inst.rho);
    return r;
  }
  throw UnknownCheck("'" + check_id + "'");
}

}  // namespace

VerificationReport run_campaign_trial(const std::string& check_id,
                                      const std::string& ensemble,
                                      std::uint64_t campaign_seed, std::size_t trial,
                                      const OptimizerConfig& cfg,
                                      const ToleranceProfile& tol) {
  const CheckInfo& info = check_info(check_id);
  const std::string spec_str = ensemble.empty() ? info.default_ensemble : ensemble;
  return dispatch_trial(check_id, parse_uri(spec_str), campaign_seed, trial, cfg, tol);
}

CampaignSummary run_campaign(const std::string& check_id, const std::string& ensemble,
                             std::size_t trials, std::size_t workers,
                             const OptimizerConfig& cfg, const ToleranceProfile& tol,
                             std::vector<VerificationReport>* all_reports) {
  const CheckInfo& info = check_info(check_id);
  const std::string spec_str = ensemble.empty() ? info.default_ensemble : ensemble;

  std::vector<VerificationReport> reports(trials);
  parallel_for(trials, workers, [&](std::size_t i) {
    reports[i] = dispatch_trial(check_id, parse_uri(spec_str), cfg.seed, i, cfg, tol);
  });

  CampaignSummary summary;
  summary.check_id = check_id;
  summary.ensemble = spec_str;
  summary.trials = trials;
  summary.min_slack = trials ? kInf : 0.0;
  for (const VerificationReport& r : reports) {
    summary.min_slack = std::min(summary.min_slack, r.slack);
    if (!r.holds) {
      ++summary.violations;
      VerificationReport copy = r;
      copy.elapsed_seconds = 0.0;  // keeps summaries comparable across runs
      summary.violation_reports.push_back(std::move(copy));
    }
  }
  if (trials == 0) summary.min_slack = 0.0;
  if (all_reports) *all_reports = std::move(reports);
  return summary;
}

CampaignSummary explore_conjecture(const std::string& ensemble, std::size_t trials,
                                   const OptimizerConfig& cfg,
                                   const ToleranceProfile& tol,
                                   std::vector<VerificationReport>* all_reports) {
  return run_campaign("conjecture", ensemble, trials, cfg.workers, cfg, tol, all_reports);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

Json report_to_json(const VerificationReport& r) {
  Json j;
  j["check_id"] = r.check_id;
  j["instance"] = r.instance;
  j["trial"] = r.trial;
  j["lhs"] = sanitize(r.lhs);
  j["rhs"] = sanitize(r.rhs);
  j["slack"] = sanitize(r.slack);
  j["holds"] = r.holds;
  j["seed"] = r.seed;
  j["elapsed_seconds"] = r.elapsed_seconds;
  if (!r.witnesses.empty()) j["witnesses"] = r.witnesses;
  return j;
}

Json summary_to_json(const CampaignSummary& s) {
  Json j;
  j["check_id"] = s.check_id;
  j["ensemble"] = s.ensemble;
  j["trials"] = s.trials;
  j["violations"] = s.violations;
  j["min_slack"] = sanitize(s.min_slack);
  Json reports = Json::array();
  for (const VerificationReport& r : s.violation_reports)
    reports.push_back(report_to_json(r));
  j["violation_reports"] = std::move(reports);
  return j;
}

void write_reports_jsonl(const std::vector<VerificationReport>& reports,
                         const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  for (const VerificationReport& r : reports) f << report_to_json(r).dump() << "\n";
}

void write_reports_csv(const std::vector<VerificationReport>& reports,
                       const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  f << "trial,lhs,rhs,slack,holds\n";
  f.precision(17);
  for (const VerificationReport& r : reports)
    f << r.trial << "," << sanitize(r.lhs) << "," << sanitize(r.rhs) << ","
      << sanitize(r.slack) << "," << (r.holds ? 1 : 0) << "\n";
}

bool summaries_equivalent(const CampaignSummary& a, const CampaignSummary& b) {
  return summary_to_json(a) == summary_to_json(b);
}

Json certificate_to_json(const FeasibilityCertificate& cert) {
  Json j;
  j["status"] = to_string(cert.status);
  j["iterations"] = cert.iterations;
  j["residual"] = sanitize(cert.residual);
  j["k"] = cert.k;
  Json groups = Json::array();
  for (const auto& g : cert.groups) groups.push_back(g);
  j["groups"] = std::move(groups);
  if (cert.witness) j["witness"] = state_to_json(*cert.witness);
  return j;
}

}  // namespace qcorr
