#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcorr/channel.hpp"
#include "qcorr/measures.hpp"
#include "qcorr/rng.hpp"

namespace qcorr {

struct OptimizerConfig {
  std::size_t restarts = 8;
  std::size_t max_iters = 400;
  double step_init = 0.4;
  double tol = 1e-7;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool general_povms = false;       // Naimark ancilla parametrization
  std::size_t dimension_cap = 256;  // guard for extendibility searches
};

/// Rotated-Petz grid shared by every recovery search: 41 tanh-spaced points
/// in [-10, 10] (t = 0 included).
std::vector<double> petz_t_grid();

// ---------------------------------------------------------------------------
// MSQ discord
// ---------------------------------------------------------------------------

struct MsqDiscordResult {
  double value = 0.0;          // I(parts) - best found I(X_1:...:X_l)
  double best_classical = 0.0; // the best found I(X_1:...:X_l)
  std::vector<Povm> best_povms;
};

/// Maximizes the post-measurement classical multipartite information over
/// product rank-1 projective measurements (general POVMs behind
/// cfg.general_povms via a one-qubit Naimark ancilla per party). Reported
/// values are "best found": the inner sup is only lower-bounded by search.
/// Multi-label parts are measured jointly; their POVM is reported on a
/// merged system labeled by joining the part's labels with '+'.
MsqDiscordResult msq_discord(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const OptimizerConfig& cfg,
    const std::vector<std::vector<ComplexMatrix>>& warm_start_bases = {},
    const ToleranceProfile& tol = ToleranceProfile::standard());

// ---------------------------------------------------------------------------
// Recovery maps
// ---------------------------------------------------------------------------

struct RecoveryResult {
  Channel channel;
  double fid = 0.0;
  double t = 0.0;  // grid parameter of the best rotated-Petz start
};

/// Best recovery of `lost` from `anchor` alone: rotated-Petz t-grid followed
/// by ascent on Kraus perturbations. fid = F(rho, R(Tr_lost rho)).
RecoveryResult optimize_recovery(
    const DensityMatrix& rho, const std::vector<std::string>& lost,
    const std::vector<std::string>& anchor, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

struct LocalRecoverySuite {
  std::vector<std::optional<Channel>> channels;  // one per masked party
  double lhs = 0.0;   // the gap
  double rhs = 0.0;   // [ dist / (2 |j^l|) ]^2
  double dist = 0.0;  // trace distance actually achieved
};

/// One member of the 2^l-inequality family: parties with mask[i] set get a
/// trace-out-and-recover map (rotated Petz from the pair marginal, the t's
/// tuned jointly by coordinate descent); the others are left alone.
LocalRecoverySuite local_recovery_suite(
    const DensityMatrix& rho, const std::vector<PartyPair>& pairs,
    const std::vector<bool>& mask, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

// ---------------------------------------------------------------------------
// Entanglement-breaking fixed points
// ---------------------------------------------------------------------------

struct SurprisalResult {
  double value = 0.0;          // -ln(best fidelity), best found
  double best_fidelity = 0.0;
};

/// Multipartite surprisal of measurement recoverability: -ln sup F over
/// tensor products of measure-and-prepare channels, POVM bases and prepared
/// states optimized jointly per party.
SurprisalResult surprisal_of_measurement_recoverability(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

// ---------------------------------------------------------------------------
// CEMI
// ---------------------------------------------------------------------------

/// The CEMI objective for one concrete extension (pairs as in `gap`); any
/// returned value / 2 upper-bounds E_I.
double cemi_gap_for_extension(const DensityMatrix& rho_ext,
                              const std::vector<PartyPair>& pairs,
                              const ToleranceProfile& tol = ToleranceProfile::standard());

struct CemiSearchResult {
  double value = 0.0;  // min found gap / 2
  DensityMatrix extension;
  std::vector<PartyPair> pairs;  // pairing used for the extension
};

/// Upper-bound search over extensions built from a purification of rho:
/// a measured-reference flag family (spans all finite flag extensions) and a
/// generic isometry-channel family on the reference, best of both.
CemiSearchResult cemi_upper_bound_search(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const std::vector<std::size_t>& ext_dims, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

/// Exploratory geometric quantity: -1/2 ln of the best fidelity achieved by
/// combining the extension search with per-party recovery optimization.
double geometric_cemi_upper(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const std::vector<std::size_t>& ext_dims, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

// ---------------------------------------------------------------------------
// k-extendibility and separability
// ---------------------------------------------------------------------------

enum class FeasibilityStatus { Feasible, InfeasibleEvidence, Undecided };

std::string to_string(FeasibilityStatus s);

struct FeasibilityCertificate {
  FeasibilityStatus status = FeasibilityStatus::Undecided;
  std::size_t iterations = 0;
  double residual = 0.0;
  std::optional<DensityMatrix> witness;
  SystemLayout witness_layout;
  std::size_t k = 1;
  std::vector<std::vector<std::string>> extended_parts;  // original blocks
  std::vector<std::vector<std::string>> groups;  // copy groups incl. originals
};

/// Dykstra-corrected alternating projections between the PSD cone, the
/// permutation-invariant subspace, and the fixed-marginal affine set.
/// Feasible comes with a witness meeting every constraint to cfg.tol;
/// InfeasibleEvidence means the residual plateaued above tol across
/// restarts (evidence, not proof).
FeasibilityCertificate dykstra_k_extendibility(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts_to_extend,
    std::size_t k, const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

struct SeparableWitness {
  double ub = 0.0;  // certified upper bound on || rho - SEP ||_1
  DensityMatrix witness;
};

/// Frank-Wolfe refinement over the convex hull of product pure states
/// (squared Frobenius objective, trace-distance reporting); the witness is
/// fully separable by construction and `ub` never increases while refining.
SeparableWitness separable_distance_witness(
    const DensityMatrix& rho, const std::vector<std::vector<std::string>>& parts,
    const OptimizerConfig& cfg,
    const ToleranceProfile& tol = ToleranceProfile::standard());

// ---------------------------------------------------------------------------
// Shared helpers (used by verify and tests as well)
// ---------------------------------------------------------------------------

/// State reordered so every part's labels are contiguous, parts in order.
DensityMatrix reorder_for_parts(const DensityMatrix& rho,
                                const std::vector<std::vector<std::string>>& parts);

/// Unitary from a Hermitian generator, exp(i H).
ComplexMatrix unitary_from_generator(const ComplexMatrix& h);

/// Deterministic gradient-free minimizer: adaptive random-direction descent.
/// Returns the best parameter vector found.
std::vector<double> adaptive_descent(
    const std::function<double(const std::vector<double>&)>& objective,
    std::vector<double> init, CounterRng& rng, std::size_t max_iters,
    double step_init, double* best_value);

}  // namespace qcorr
